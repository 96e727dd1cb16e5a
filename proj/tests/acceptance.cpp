// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line so a full run reads as a checklist.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bwb/abpre.hpp"
#include "bwb/analysis.hpp"
#include "bwb/csv.hpp"
#include "bwb/engine.hpp"
#include "bwb/experiments.hpp"
#include "bwb/spine.hpp"
#include "bwb/stats.hpp"
#include "oracles.hpp"

using namespace bwb;
namespace fs = std::filesystem;

namespace {

void report(int criterion, const char* label, bool pass, const std::string& detail = "") {
    std::printf("[acceptance] criterion %d (%s): %s%s%s\n", criterion, label,
                pass ? "PASS" : "FAIL", detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
}

std::string outcome_key(const std::map<std::uint64_t, std::uint64_t>& contaminated,
                        std::uint64_t empties) {
    std::string key;
    for (const auto& [z, c] : contaminated)
        for (std::uint64_t i = 0; i < c; ++i) key += std::to_string(z) + ",";
    return key + "|" + std::to_string(empties);
}

bool one_step_law_matches(const ModelSpec& spec, std::uint64_t z, std::uint64_t samples,
                          std::uint64_t seed, double* p_out) {
    std::map<std::string, double> exact;
    for (const auto& [k, pk] : spec.cell_law.law().atoms()) {
        if (k == 0) {
            exact[outcome_key({}, 0)] += pk;
            continue;
        }
        for (const auto& [vec, q] :
             oracle::convolve_power(oracle::kernel_table(spec.kernel(k)), z)) {
            std::map<std::uint64_t, std::uint64_t> cont;
            std::uint64_t empties = 0;
            for (auto c : vec)
                if (c > 0)
                    cont[c] += 1;
                else
                    ++empties;
            exact[outcome_key(cont, empties)] += pk * q;
        }
    }
    std::map<std::string, std::uint64_t> counts;
    Rng rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i) {
        PopulationState state{{{z, 1}}, 0, 0};
        PopulationState next;
        if (step(state, spec, rng, Caps{}, true, &next)) return false;
        ++counts[outcome_key(next.contaminated, next.empty_cells)];
    }
    std::vector<std::uint64_t> obs;
    std::vector<double> probs;
    for (const auto& [key, p] : exact) {
        auto it = counts.find(key);
        obs.push_back(it == counts.end() ? 0 : it->second);
        probs.push_back(p);
        if (it != counts.end()) counts.erase(it);
    }
    if (!counts.empty()) return false;
    double p = chi_square_gof(obs, probs).p_value;
    *p_out = std::min(*p_out, p);
    return p > 1e-3;
}

double max_spinal_law_error(const ModelSpec& spec, std::uint64_t z) {
    SpinalStepLaw law = spinal_step_law(z, spec);
    auto composed = oracle::spinal_step_by_construction(spec, z);
    std::map<oracle::SpinalAtomKey, double> direct;
    for (const auto& a : law.atoms) direct[{a.k, a.l, a.daughters}] += a.prob;
    if (direct.size() != composed.size()) return HUGE_VAL;
    double err = 0.0;
    for (const auto& [key, p] : composed) {
        auto it = direct.find(key);
        if (it == direct.end()) return HUGE_VAL;
        err = std::max(err, std::abs(it->second - p));
    }
    return err;
}

double max_joint_collapse_error(const ModelSpec& spec) {
    // The product of the three construction pieces must collapse to
    // p_k P(x) / gamma for every (x, k, pick).
    MomentTable m = compute_moments(spec);
    DiscreteLaw that = spinal_daughter_count_law(spec);
    double err = 0.0;
    for (const auto& [k, pk] : spec.cell_law.law().atoms()) {
        if (k == 0 || spec.kernel(k).total_mean() <= 0.0) continue;
        VectorLaw xhat = spinal_offspring_law(spec, k);
        for (const auto& [x, px_hat] : xhat.atoms()) {
            std::uint64_t total = 0;
            for (auto c : x) total += c;
            double joint = that.mass_at(k) * px_hat / static_cast<double>(total);
            double expected = pk / m.gamma * spec.kernel(k).as_table().mass_of(x);
            err = std::max(err, std::abs(joint - expected));
        }
    }
    return err;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(BWB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("criterion 1: exact one-step laws") {
    double min_p = 1.0;
    bool engine_ok = true;
    engine_ok &= one_step_law_matches(fixtures::bin2(), 1, 100000, 90001, &min_p);
    engine_ok &= one_step_law_matches(fixtures::bin2(), 2, 100000, 90002, &min_p);
    engine_ok &= one_step_law_matches(fixtures::asym(), 1, 100000, 90003, &min_p);
    engine_ok &= one_step_law_matches(fixtures::asym(), 2, 100000, 90004, &min_p);

    double spine_err = 0.0;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        spine_err = std::max(spine_err, max_joint_collapse_error(spec));
        for (std::uint64_t z : {1ull, 2ull})
            spine_err = std::max(spine_err, max_spinal_law_error(spec, z));
    }
    bool spine_ok = spine_err <= 1e-10;
    report(1, "exact one-step laws", engine_ok && spine_ok,
           "min chi2 p = " + fmt_double(min_p) + ", max spinal law error = " +
               fmt_double(spine_err));
    CHECK(engine_ok);
    CHECK(spine_ok);
}

TEST_CASE("criterion 2: contaminated-mean identity") {
    bool exact_ok = true;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        auto [lhs, rhs] = contaminated_mean_identity_exact_n1(spec);
        exact_ok &= std::abs(lhs - rhs) <= 1e-10;
    }
    bool mc_ok = true;
    std::string detail;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        IdentityCheck check =
            contaminated_mean_identity(spec, {2, 3, 4, 5, 6}, 100000, 424242, 2);
        mc_ok &= check.all_overlap;
        for (const auto& row : check.rows)
            if (!row.ci_overlap)
                detail += spec.name + " n=" + std::to_string(row.n) + " disjoint; ";
    }
    report(2, "mean identity, exact at one step and MC to six", exact_ok && mc_ok, detail);
    CHECK(exact_ok);
    CHECK(mc_ok);
}

TEST_CASE("criterion 3: rho consistency") {
    bool closed_ok = true;
    int closed_count = 0;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym(), fixtures::weak()}) {
        RhoResult r = compute_rho(abpre_env(spec));
        if (r.closed_form) {
            closed_ok &= std::abs(*r.closed_form - r.numeric) <= 1e-9;
            ++closed_count;
        }
    }
    Rng rng(60601);
    int generated = 0;
    while (generated < 50) {
        ModelSpec spec = oracle::random_table_model(rng);
        AbpreEnv env = abpre_env(spec);
        if (env.all_means_zero()) continue;
        ++generated;
        RhoResult r = compute_rho(env);
        if (r.closed_form) {
            closed_ok &= std::abs(*r.closed_form - r.numeric) <= 1e-9;
            ++closed_count;
        }
        closed_ok &= r.numeric <= std::min(1.0, env.gamma / env.nu) + 1e-12;
    }

    AbpreEnv weak_env = abpre_env(fixtures::weak());
    RhoResult weak = compute_rho(weak_env);
    std::vector<std::pair<double, double>> wm;
    for (const auto& a : weak_env.atoms) wm.emplace_back(a.weight, a.mean);
    double grid = oracle::rho_grid(wm, 1e-7);
    bool grid_ok = std::abs(weak.numeric - grid) <= 1e-6 && std::abs(weak.numeric - 0.65276) < 1e-4;

    report(3, "rho closed forms and grid oracle", closed_ok && grid_ok,
           "closed-form checks: " + std::to_string(closed_count) + ", weak-fixture rho = " +
               fmt_double(weak.numeric) + " vs grid " + fmt_double(grid));
    CHECK(closed_ok);
    CHECK(grid_ok);
    CHECK(closed_count > 10);
}

TEST_CASE("criterion 4: parasite martingale dichotomy") {
    bool mean_one_ok = true;
    std::string detail;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        ExperimentParams p;
        p.horizon = 12;
        p.reps = 10000;
        p.seed = 70707;
        ExperimentResult res = exp_thm24_25(spec, p);
        mean_one_ok &= res.passed();
        for (const auto& c : res.checks)
            if (c.name == "mean_w_one")
                detail += spec.name + " mean W = " + fmt_double(c.statistic) + "; ";
    }

    // The naive degenerate candidate (two daughters, kernel half (2,2) and
    // half (0,0)) has E m log m = 0 but a strictly negative drift
    // E (m/gamma) log(m/gamma), so the exact classifier calls it mean-one;
    // the degenerate branch therefore runs on a verified drift-positive model.
    ModelSpec candidate;
    candidate.name = "candidate";
    candidate.cell_law = CellOffspringLaw({{2, 1.0}});
    candidate.kernels[2] = SharingKernel::table(2, VectorLaw(2, {{{2, 2}, 0.5}, {{0, 0}, 0.5}}));
    bool candidate_is_mean_one =
        classify_W(compute_moments(candidate), abpre_env(candidate)).mean_one;

    ModelSpec degenerate = fixtures::boost();
    WClassification wc = classify_W(compute_moments(degenerate), abpre_env(degenerate));
    bool class_ok = !wc.mean_one && wc.reason == WReason::DriftNonNegative;

    ExperimentParams pz;
    pz.horizon = 25;
    pz.reps = 1000;
    pz.seed = 70708;
    pz.caps = Caps{50'000'000'000'000ull, 2'000'000};
    ExperimentResult degen = exp_thm24_25(degenerate, pz);
    bool degen_ok = degen.passed();
    double mean_w25 = 0.0;
    for (const auto& c : degen.checks)
        if (c.name == "mean_w_small") mean_w25 = c.statistic;

    report(4, "Kesten-Stigum martingale", mean_one_ok && class_ok && degen_ok && candidate_is_mean_one,
           detail + "degenerate model mean W_25 = " + fmt_double(mean_w25) +
               (candidate_is_mean_one
                    ? " (zero E m log m candidate verifies as mean-one; drift-positive model used)"
                    : ""));
    CHECK(mean_one_ok);
    CHECK(class_ok);
    CHECK(degen_ok);
    CHECK(candidate_is_mean_one);
}

TEST_CASE("criterion 5: growth rate of the contaminated-cell count") {
    ExperimentParams p;
    p.horizon = 25;
    p.reps = 600;
    p.seed = 50505;
    p.threads = 2;
    ExperimentResult res = exp_thm22(fixtures::asym(), p);
    double rate = 0.0, target = 0.0;
    std::size_t survivors = 0;
    for (const auto& c : res.checks)
        if (c.name == "growth_rate") {
            rate = c.statistic;
            target = c.threshold;
        }
    BatchParams bp;
    bp.reps = p.reps;
    bp.run.horizon = p.horizon;
    bp.capture_trajectories = true;
    BatchResult batch = run_batch(fixtures::asym(), bp, p.seed);
    for (const auto& t : batch.trajectories)
        if (t.status.kind == TerminalKind::Alive) ++survivors;

    bool ok = res.passed() && survivors >= 500;
    report(5, "growth rate log(nu rho)", ok,
           "mean rate " + fmt_double(rate) + " vs target " + fmt_double(target) + " over " +
               std::to_string(survivors) + " survivors");
    CHECK(res.passed());
    CHECK(survivors >= 500);
}

TEST_CASE("criterion 6: spinal process equals the immigration process") {
    double max_err = 0.0;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        EnvAtomStream stream = abprei_stream(spec);
        for (std::uint64_t z_spine : {1ull, 2ull, 3ull}) {
            SpinalStepLaw law = spinal_step_law(z_spine, spec);
            std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, double> spine_joint;
            for (const auto& a : law.atoms)
                spine_joint[{a.l, a.k, a.daughters[a.l - 1] - 1}] += a.prob;
            std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, double> bprei_joint;
            for (const auto& [atom, next] : one_step_joint_law(stream, z_spine - 1))
                for (const auto& [v, q] : next.atoms())
                    bprei_joint[{atom->j, atom->k, v}] += atom->weight * q;
            if (spine_joint.size() != bprei_joint.size()) {
                max_err = HUGE_VAL;
                continue;
            }
            for (const auto& [key, pr] : spine_joint) {
                auto it = bprei_joint.find(key);
                if (it == bprei_joint.end())
                    max_err = HUGE_VAL;
                else
                    max_err = std::max(max_err, std::abs(it->second - pr));
            }
        }
    }
    bool exact_ok = max_err <= 1e-10;

    // Sampled three-step laws, spinal route vs immigration route.
    double min_p = 1.0;
    for (const ModelSpec& spec : {fixtures::bin2(), fixtures::asym()}) {
        EnvAtomStream stream = abprei_stream(spec);
        std::map<std::uint64_t, std::uint64_t> spine_counts, bprei_counts;
        const std::uint64_t reps = 100000;
        for (std::uint64_t r = 0; r < reps; ++r) {
            SpineRecord rec = run_spine(spec, 3, derive_stream(660, stream_tag::spine, r));
            ++spine_counts[rec.rows.back().z_spine - 1];
            BpreiTrajectory t = run_bprei(stream, 3, derive_stream(661, stream_tag::bprei, r));
            ++bprei_counts[t.rows.back().z];
        }
        std::vector<std::uint64_t> a, b;
        std::map<std::uint64_t, bool> keys;
        for (const auto& [v, c] : spine_counts) keys[v] = true;
        for (const auto& [v, c] : bprei_counts) keys[v] = true;
        for (const auto& [v, unused] : keys) {
            a.push_back(spine_counts.count(v) ? spine_counts[v] : 0);
            b.push_back(bprei_counts.count(v) ? bprei_counts[v] : 0);
        }
        min_p = std::min(min_p, chi_square_two_sample(a, b).p_value);
    }
    bool mc_ok = min_p > 1e-3;
    report(6, "spinal equivalence", exact_ok && mc_ok,
           "max one-step error " + fmt_double(max_err) + ", min two-sample p " + fmt_double(min_p));
    CHECK(exact_ok);
    CHECK(mc_ok);
}

TEST_CASE("criterion 7: spinal criticality identity and correspondence") {
    double max_err = 0.0;
    bool consistent = true;
    auto check_model = [&](const ModelSpec& spec) {
        AbpreEnv env = abpre_env(spec);
        if (env.gamma <= 0.0) return;
        AbpreiReport r = abprei_criticality(spec, env);
        max_err = std::max(max_err, std::abs(r.e_log_mean_direct - r.e_log_mean_via_env));
        consistent &= r.consistent;
    };
    for (const ModelSpec& spec :
         {fixtures::bin2(), fixtures::asym(), fixtures::weak(), fixtures::sub(), fixtures::boost()})
        check_model(spec);
    Rng rng(70701);
    for (int i = 0; i < 50; ++i) check_model(oracle::random_table_model(rng));

    bool ok = max_err <= 1e-10 && consistent;
    report(7, "criticality identity", ok, "max evaluation gap " + fmt_double(max_err));
    CHECK(max_err <= 1e-10);
    CHECK(consistent);
}

TEST_CASE("criterion 8: truncated-mean norming recursion") {
    // Start at or above the support bound: exact geometric growth.
    bool geometric_ok = true;
    {
        NormingSequence seq = heyde_seneta_norming(fixtures::bin2().cell_law, 4.0, 10);
        double expect = 4.0;
        for (std::size_t i = 0; i < seq.values.size(); ++i) {
            geometric_ok &= (seq.values[i] == expect);
            expect *= 2.0;
        }
        CellOffspringLaw law({{1, 0.3}, {2, 0.2}, {6, 0.5}});
        NormingSequence s2 = heyde_seneta_norming(law, 6.0, 12);
        double x = 6.0;
        for (std::size_t i = 0; i < s2.values.size(); ++i) {
            geometric_ok &= (s2.values[i] == x);
            x *= law.law().mean();
        }
    }
    report(8, "norming geometric for a above the support bound", geometric_ok);
    CHECK(geometric_ok);

    // Reference-value clause: cell law {1: .2, 2: .3, 4: .5} with a = 3 is
    // required to reproduce (2.4, 6.72, 18.816). Those values presuppose that
    // the truncation stops biting after the first step; under the defining
    // recursion c_n = c_{n-1} E[N 1{N <= c_{n-1}}] the start is rejected
    // outright (E[N 1{N <= 3}] = 0.8 <= 1, the documented "a too small"
    // error) and no evaluation of the recursion yields an increasing
    // sequence from it. The clause is kept as stated and reported honestly
    // as failing.
    CellOffspringLaw heavy({{1, 0.2}, {2, 0.3}, {4, 0.5}});
    bool reproduced = false;
    std::string note;
    try {
        NormingSequence seq = heyde_seneta_norming(heavy, 3.0, 3);
        reproduced = seq.values.size() == 4 && std::abs(seq.values[1] - 2.4) <= 1e-12 &&
                     std::abs(seq.values[2] - 6.72) <= 1e-12 &&
                     std::abs(seq.values[3] - 18.816) <= 1e-12;
        note = "recursion returned (" + fmt_double(seq.values[1]) + ", " +
               fmt_double(seq.values[2]) + ", " + fmt_double(seq.values[3]) + ")";
    } catch (const std::invalid_argument& e) {
        note = std::string("rejected: ") + e.what();
    }
    report(8, "norming reference values", reproduced,
           note + " [expected: the reference values are inconsistent with the recursion "
                  "definition and its precondition; left failing by design]");
    CHECK_MESSAGE(reproduced,
                  "reference values (2.4, 6.72, 18.816) are unreachable under the defining "
                  "recursion; the start a = 3 violates its own precondition");
}

TEST_CASE("criterion 9: immigration-process limits") {
    EnvAtom atom;
    atom.weight = 1.0;
    atom.offspring = DiscreteLaw({{1, 0.5}, {3, 0.5}});  // mean 2
    atom.immigration = DiscreteLaw::point(1);
    EnvAtomStream stream({atom});

    std::vector<double> variations;
    for (int r = 0; r < 1000; ++r) {
        BpreiTrajectory t = run_bprei(stream, 30, derive_stream(9090, stream_tag::bprei, r));
        variations.push_back(normalized_tail_variation(t, 20, 30));
    }
    MeanSe ms = mean_se(variations);
    bool stabilizes = ms.mean < 0.10;

    EnvAtom mean15;
    mean15.weight = 1.0;
    mean15.offspring = DiscreteLaw({{1, 0.5}, {2, 0.5}});
    mean15.immigration = DiscreteLaw({{0, 0.5}, {2, 0.5}});
    DecayTable table = conditional_mean_decay(EnvAtomStream({mean15}), 2.0, 30, 1000, 9091);
    bool decreasing = true;
    for (std::size_t n = 11; n < table.rows.size(); ++n)
        decreasing &= table.rows[n].mean_ratio < table.rows[n - 1].mean_ratio;

    report(9, "immigration-process stabilization and decay", stabilizes && decreasing,
           "mean tail variation " + fmt_double(ms.mean) + ", decay at horizon " +
               fmt_double(table.rows.back().mean_ratio));
    CHECK(stabilizes);
    CHECK(decreasing);
}

TEST_CASE("criterion 10: bitwise reproducibility across thread counts") {
    fs::path base = fs::temp_directory_path() / "bwb_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    std::string model = std::string(BWB_MODELS_DIR) + "/m_asym.json";

    bool sim_ok = false, exp_ok = false;
    {
        fs::path d1 = base / "sim1", d2 = base / "sim2";
        int rc1 = run_cli("simulate --model " + model +
                          " --horizon 10 --reps 500 --seed 99 --threads 1 --out " + d1.string());
        int rc2 = run_cli("simulate --model " + model +
                          " --horizon 10 --reps 500 --seed 99 --threads 3 --out " + d2.string());
        sim_ok = rc1 == 0 && rc2 == 0 &&
                 slurp(d1 / "trajectories.csv") == slurp(d2 / "trajectories.csv") &&
                 slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv") &&
                 !slurp(d1 / "trajectories.csv").empty();
    }
    {
        fs::path d1 = base / "exp1", d2 = base / "exp2";
        int rc1 = run_cli("experiment --name thm24_25 --model " + model +
                          " --horizon 10 --reps 300 --seed 44 --threads 1 --out " + d1.string());
        int rc2 = run_cli("experiment --name thm24_25 --model " + model +
                          " --horizon 10 --reps 300 --seed 44 --threads 2 --out " + d2.string());
        exp_ok = rc1 == 0 && rc2 == 0 &&
                 slurp(d1 / "thm24_25_summary.csv") == slurp(d2 / "thm24_25_summary.csv") &&
                 slurp(d1 / "thm24_25_result.json") == slurp(d2 / "thm24_25_result.json") &&
                 !slurp(d1 / "thm24_25_summary.csv").empty();
    }
    report(10, "thread-count invariance of raw outputs", sim_ok && exp_ok);
    CHECK(sim_ok);
    CHECK(exp_ok);
}
