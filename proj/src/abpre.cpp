#include "bwb/abpre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bwb/engine.hpp"
#include "bwb/stats.hpp"

namespace bwb {

EnvAtomStream::EnvAtomStream(std::vector<EnvAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("environment stream: no atoms");
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (a.weight < 0.0) throw std::invalid_argument("environment stream: negative weight");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > kRenormTolerance)
        throw std::invalid_argument("environment stream: weights sum to " + std::to_string(total));
    cdf_.resize(atoms_.size());
    double run = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        run += atoms_[i].weight / total;
        cdf_[i] = run;
    }
    cdf_.back() = 1.0;
}

std::size_t EnvAtomStream::sample_index(Rng& rng) const {
    double u = rng.next_unit();
    std::size_t i = std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
    return std::min(i, atoms_.size() - 1);
}

bool EnvAtomStream::has_immigration() const {
    for (const auto& a : atoms_)
        if (!a.immigration) return false;
    return true;
}

double EnvAtomStream::p_immigration_positive() const {
    double p = 0.0;
    for (const auto& a : atoms_)
        if (a.immigration) p += a.weight * (1.0 - a.immigration->p_zero());
    return p;
}

double EnvAtomStream::e_log_mean() const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        double m = a.offspring.mean();
        if (m <= 0.0) return -HUGE_VAL;
        s += a.weight * std::log(m);
    }
    return s;
}

EnvAtomStream abpre_stream(const ModelSpec& spec) {
    AbpreEnv env = abpre_env(spec);
    std::vector<EnvAtom> atoms;
    for (const auto& a : env.atoms) {
        EnvAtom atom;
        atom.j = a.j;
        atom.k = a.k;
        atom.weight = a.weight;
        atom.offspring = spec.kernel(a.k).component_marginal(a.j - 1);
        atoms.push_back(std::move(atom));
    }
    return EnvAtomStream(std::move(atoms));
}

EnvAtomStream abprei_stream(const ModelSpec& spec) {
    spec.validate();
    MomentTable m = compute_moments(spec);
    if (m.gamma <= 0.0) throw std::invalid_argument("abprei stream: gamma must be positive");
    std::vector<EnvAtom> atoms;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        for (std::uint64_t j = 0; j < k; ++j) {
            DiscreteLaw marg = spec.kernel(k).component_marginal(j);
            double mu = marg.mean();
            if (mu <= 0.0) continue;  // weight p_k * 0 / gamma
            EnvAtom atom;
            atom.j = j + 1;
            atom.k = k;
            atom.weight = p * mu / m.gamma;
            atom.offspring = marg;
            // Immigrants: the spinal parasite's component is size-biased and
            // one offspring continues the spine, so xi = (size-biased) - 1.
            DiscreteLaw biased = marg.size_biased();
            std::vector<std::pair<std::uint64_t, double>> shifted;
            for (const auto& [v, q] : biased.atoms()) shifted.emplace_back(v - 1, q);
            atom.immigration = DiscreteLaw(std::move(shifted));
            atoms.push_back(std::move(atom));
        }
    }
    return EnvAtomStream(std::move(atoms));
}

AbpreTrajectory run_abpre(const EnvAtomStream& stream, std::uint64_t horizon, Rng rng) {
    constexpr std::uint64_t kLimit = 1'000'000'000'000ull;
    AbpreTrajectory traj;
    std::uint64_t z = 1;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        std::size_t idx = stream.sample_index(rng);
        traj.rows.push_back({n, z, idx});
        z = stream.atoms()[idx].offspring.sample_iid_sum(z, rng);
        if (z > kLimit)
            throw std::runtime_error("parasite line exceeds internal limit; reduce the horizon");
    }
    traj.rows.push_back({horizon, z, std::nullopt});
    return traj;
}

BpreiTrajectory run_bprei(const EnvAtomStream& stream, std::uint64_t horizon, Rng rng) {
    if (!stream.has_immigration())
        throw std::invalid_argument("bprei: every atom needs an immigration law");
    if (stream.p_immigration_positive() <= 0.0)
        throw std::invalid_argument("bprei: immigration must occur with positive probability");
    constexpr std::uint64_t kLimit = 1'000'000'000'000'000ull;

    BpreiTrajectory traj;
    std::uint64_t z = 0;
    double prod_mu = 1.0;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        std::size_t idx = stream.sample_index(rng);
        const EnvAtom& atom = stream.atoms()[idx];
        std::uint64_t xi = atom.immigration->sample(rng);
        BpreiRow row{n, z, idx, xi, prod_mu, prod_mu > 0.0 ? static_cast<double>(z) / prod_mu : 0.0};
        traj.rows.push_back(row);
        z = atom.offspring.sample_iid_sum(z, rng) + xi;
        if (z > kLimit)
            throw std::runtime_error("population exceeds internal limit; reduce the horizon");
        prod_mu *= atom.offspring.mean();
    }
    traj.rows.push_back(
        {horizon, z, std::nullopt, 0, prod_mu, prod_mu > 0.0 ? static_cast<double>(z) / prod_mu : 0.0});
    return traj;
}

double normalized_tail_variation(const BpreiTrajectory& traj, std::uint64_t lo, std::uint64_t hi) {
    double vmin = HUGE_VAL, vmax = -HUGE_VAL, sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : traj.rows) {
        if (row.n < lo || row.n > hi) continue;
        vmin = std::min(vmin, row.z_norm);
        vmax = std::max(vmax, row.z_norm);
        sum += row.z_norm;
        ++n;
    }
    if (n == 0 || sum <= 0.0) return HUGE_VAL;
    return (vmax - vmin) / (sum / static_cast<double>(n));
}

std::pair<double, double> contaminated_mean_identity_exact_n1(const ModelSpec& spec) {
    // Left side from the environment atoms.
    EnvAtomStream stream = abpre_stream(spec);
    double p_alive = 0.0;
    for (const auto& a : stream.atoms()) p_alive += a.weight * (1.0 - a.offspring.p_zero());
    double nu = spec.cell_law.nu();
    double lhs = nu * p_alive;

    // Right side directly from the kernels: a daughter is contaminated
    // exactly when the single ancestor parasite sends it offspring.
    double rhs = 0.0;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        for (std::uint64_t j = 0; j < k; ++j)
            rhs += p * (1.0 - spec.kernel(k).component_marginal(j).p_zero());
    }
    return {lhs, rhs};
}

IdentityCheck contaminated_mean_identity(const ModelSpec& spec,
                                         const std::vector<std::uint64_t>& n_values,
                                         std::uint64_t reps, std::uint64_t seed,
                                         unsigned threads) {
    std::uint64_t horizon = 0;
    for (auto n : n_values) horizon = std::max(horizon, n);

    EnvAtomStream stream = abpre_stream(spec);
    std::vector<std::uint64_t> alive(horizon + 1, 0);
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = derive_stream(seed, stream_tag::abpre, r);
        AbpreTrajectory t = run_abpre(stream, horizon, rng);
        for (const auto& row : t.rows)
            if (row.z > 0) ++alive[row.n];
    }

    BatchParams bp;
    bp.reps = reps;
    bp.run.horizon = horizon;
    bp.threads = threads;
    BatchResult batch = run_batch(spec, bp, seed);

    double nu = spec.cell_law.nu();
    IdentityCheck out;
    for (auto n : n_values) {
        IdentityRow row;
        row.n = n;
        double scale = std::pow(nu, static_cast<double>(n));
        Interval pci = proportion_ci99(alive[n], reps);
        row.lhs = scale * static_cast<double>(alive[n]) / static_cast<double>(reps);
        row.lhs_lo = scale * pci.lo;
        row.lhs_hi = scale * pci.hi;
        const SummaryRow& s = batch.summary.rows[n];
        row.rhs = scale * s.mean_s;
        row.rhs_lo = scale * (s.mean_s - kZ99 * s.se_s);
        row.rhs_hi = scale * (s.mean_s + kZ99 * s.se_s);
        row.ci_overlap = Interval{row.lhs_lo, row.lhs_hi}.overlaps({row.rhs_lo, row.rhs_hi});
        out.all_overlap = out.all_overlap && row.ci_overlap;
        out.rows.push_back(row);
    }
    return out;
}

DecayTable conditional_mean_decay(const EnvAtomStream& stream, double c, std::uint64_t horizon,
                                  std::uint64_t reps, std::uint64_t seed) {
    if (!(c > 0.0)) throw std::invalid_argument("decay: c must be positive");
    if (!stream.has_immigration())
        throw std::invalid_argument("decay: every atom needs an immigration law");
    double elog = stream.e_log_mean();
    if (!(elog < std::log(c)))
        throw std::invalid_argument("decay: requires E log mu < log c, got E log mu = " +
                                    std::to_string(elog) + " vs log c = " + std::to_string(std::log(c)));

    std::vector<double> sums(horizon + 1, 0.0);
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = derive_stream(seed, stream_tag::bprei, r);
        double e = 0.0;
        double cpow = 1.0;
        sums[0] += 0.0;
        for (std::uint64_t n = 0; n < horizon; ++n) {
            std::size_t idx = stream.sample_index(rng);
            const EnvAtom& atom = stream.atoms()[idx];
            std::uint64_t xi = atom.immigration->sample(rng);
            e = e * atom.offspring.mean() + static_cast<double>(xi);
            cpow *= c;
            sums[n + 1] += e / cpow;
        }
    }
    DecayTable table;
    table.c = c;
    for (std::uint64_t n = 0; n <= horizon; ++n)
        table.rows.push_back({n, sums[n] / static_cast<double>(reps)});
    return table;
}

std::vector<std::pair<const EnvAtom*, DiscreteLaw>> one_step_joint_law(const EnvAtomStream& stream,
                                                                       std::uint64_t z,
                                                                       std::size_t atom_cap) {
    std::vector<std::pair<const EnvAtom*, DiscreteLaw>> out;
    for (const auto& atom : stream.atoms()) {
        DiscreteLaw next = atom.offspring.power_convolve(z, atom_cap);
        if (atom.immigration) next = next.convolve(*atom.immigration, atom_cap);
        out.emplace_back(&atom, std::move(next));
    }
    return out;
}

}  // namespace bwb
