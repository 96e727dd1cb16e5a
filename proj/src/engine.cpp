#include "bwb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bwb/stats.hpp"

namespace bwb {

std::uint64_t PopulationState::contaminated_count() const {
    std::uint64_t t = 0;
    for (const auto& [z, c] : contaminated) t += c;
    return t;
}

std::uint64_t PopulationState::parasite_count() const {
    std::uint64_t t = 0;
    for (const auto& [z, c] : contaminated) t += z * c;
    return t;
}

std::optional<StepError> step(const PopulationState& state, const ModelSpec& spec, Rng& rng,
                              const Caps& caps, bool track_empty, PopulationState* out) {
    PopulationState next;
    next.generation = state.generation + 1;
    std::uint64_t next_parasites = 0;
    std::uint64_t next_contaminated = 0;
    std::uint64_t next_empty = 0;

    std::vector<std::uint64_t> daughters;

    for (const auto& [z, count] : state.contaminated) {
        for (std::uint64_t c = 0; c < count; ++c) {
            std::uint64_t k = spec.cell_law.law().sample(rng);
            if (k == 0) continue;  // the cell dies and its parasites with it
            const auto& kern = spec.kernel(k);
            daughters.assign(k, 0);
            kern.sample_sum_into(rng, z, daughters);
            for (std::uint64_t j = 0; j < k; ++j) {
                if (daughters[j] > 0) {
                    next.contaminated[daughters[j]] += 1;
                    next_parasites += daughters[j];
                    next_contaminated += 1;
                } else if (track_empty) {
                    next_empty += 1;
                }
            }
            if (next_parasites > caps.max_parasites)
                return StepError{StepError::Kind::ParasiteCap};
            if (next_contaminated > caps.max_cells)
                return StepError{StepError::Kind::CellCap};
        }
    }

    if (track_empty) {
        // Parasite-free cells branch as an ordinary cell tree, sampled
        // exactly, one daughter count per cell.
        for (std::uint64_t c = 0; c < state.empty_cells; ++c) {
            next_empty += spec.cell_law.law().sample(rng);
            if (next_contaminated + next_empty > caps.max_cells)
                return StepError{StepError::Kind::CellCap};
        }
        next.empty_cells = next_empty;
    }

    *out = std::move(next);
    return std::nullopt;
}

namespace {

Trajectory run_prepared(const ModelSpec& spec, const MomentTable& moments, const RunParams& params,
                        Rng rng) {
    Trajectory traj;
    PopulationState state = PopulationState::initial();

    double gamma_pow = 1.0, nu_pow = 1.0;
    for (std::uint64_t n = 0;; ++n) {
        TrajectoryRow row;
        row.n = n;
        row.contaminated = state.contaminated_count();
        row.parasites = state.parasite_count();
        if (params.track_empty)
            row.total_cells = row.contaminated + state.empty_cells;
        row.w = static_cast<double>(row.parasites) / gamma_pow;
        row.s = static_cast<double>(row.contaminated) / nu_pow;
        traj.rows.push_back(row);

        if (row.contaminated == 0) {
            traj.status = {TerminalKind::Extinct, n};
            return traj;
        }
        if (n == params.horizon) {
            traj.status = {TerminalKind::Alive, n};
            return traj;
        }
        PopulationState next;
        if (step(state, spec, rng, params.caps, params.track_empty, &next)) {
            traj.status = {TerminalKind::CapHit, n};
            return traj;
        }
        state = std::move(next);
        gamma_pow *= moments.gamma;
        nu_pow *= moments.nu;
    }
}

}  // namespace

Trajectory run(const ModelSpec& spec, const RunParams& params, Rng rng) {
    spec.validate();
    return run_prepared(spec, compute_moments(spec), params, rng);
}

namespace {

/// Compact per-replicate record used by the aggregation pass.
struct RepRecord {
    std::vector<double> w, s;
    std::vector<std::uint64_t> tstar;
    TerminalStatus status;
    std::uint64_t rows = 0;
};

RepRecord record_of(const Trajectory& t) {
    RepRecord r;
    r.status = t.status;
    r.rows = t.rows.size();
    r.w.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        r.w.push_back(row.w);
        r.s.push_back(row.s);
        r.tstar.push_back(row.contaminated);
    }
    return r;
}

}  // namespace

BatchResult run_batch(const ModelSpec& spec, const BatchParams& params, std::uint64_t seed) {
    spec.validate();
    const MomentTable moments = compute_moments(spec);
    const std::uint64_t reps = params.reps;
    std::vector<RepRecord> records(reps);
    std::vector<Trajectory> captured;
    if (params.capture_trajectories) captured.resize(reps);

    unsigned threads = params.threads ? params.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(reps, 1)));

    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            Rng rng = derive_stream(seed, stream_tag::engine, r);
            Trajectory t = run_prepared(spec, moments, params.run, rng);
            records[r] = record_of(t);
            if (params.capture_trajectories) captured[r] = std::move(t);
        }
    };
    if (threads <= 1) {
        worker(0, reps);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (reps + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::uint64_t b = t * chunk, e = std::min<std::uint64_t>(reps, b + chunk);
            if (b >= e) break;
            pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // Sequential aggregation in replicate order keeps results independent of
    // the thread count.
    BatchResult out;
    for (std::uint64_t n = 0; n <= params.run.horizon; ++n) {
        SummaryRow row;
        row.n = n;
        std::vector<double> ws, ss, logts;
        std::size_t extinct = 0, caphit = 0;
        for (const auto& rec : records) {
            bool rep_capped = rec.status.kind == TerminalKind::CapHit;
            if (rep_capped && n > rec.status.at) {
                ++caphit;
                continue;  // truncated: unknown beyond the cap
            }
            double w = 0.0, s = 0.0;
            std::uint64_t tstar = 0;
            if (n < rec.rows) {
                w = rec.w[n];
                s = rec.s[n];
                tstar = rec.tstar[n];
            }
            // n >= rec.rows only happens after extinction: zeros are exact.
            ws.push_back(w);
            ss.push_back(s);
            if (tstar > 0)
                logts.push_back(std::log(static_cast<double>(tstar)));
            else
                ++extinct;
        }
        row.reps_valid = ws.size();
        MeanSe mw = mean_se(ws), ms = mean_se(ss), ml = mean_se(logts);
        row.mean_w = mw.mean;
        row.se_w = mw.se;
        row.mean_s = ms.mean;
        row.se_s = ms.se;
        row.survivors = logts.size();
        row.mean_log_tstar = ml.mean;
        row.se_log_tstar = ml.se;
        row.extinct_frac = row.reps_valid ? static_cast<double>(extinct) / row.reps_valid : 0.0;
        row.caphit_frac = reps ? static_cast<double>(caphit) / reps : 0.0;
        out.summary.rows.push_back(row);
    }
    out.trajectories = std::move(captured);
    return out;
}

const char* to_string(TerminalKind k) {
    switch (k) {
        case TerminalKind::Alive: return "alive";
        case TerminalKind::Extinct: return "extinct";
        case TerminalKind::CapHit: return "cap_hit";
    }
    return "?";
}

}  // namespace bwb
