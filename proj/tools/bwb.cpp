// bwb: branching-within-branching simulation and analysis toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bwb/abpre.hpp"
#include "bwb/analysis.hpp"
#include "bwb/csv.hpp"
#include "bwb/engine.hpp"
#include "bwb/experiments.hpp"
#include "bwb/model_io.hpp"
#include "bwb/spine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bwb;

namespace {

json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json regime_to_json(const RegimeReport& rep) {
    json mu = json::array();
    for (const auto& [jk, m] : rep.moments.mu)
        mu.push_back({{"j", jk.first}, {"k", jk.second}, {"mean", m}});
    json atoms = json::array();
    for (const auto& a : rep.env.atoms)
        atoms.push_back(
            {{"j", a.j}, {"k", a.k}, {"weight", a.weight}, {"mean", a.mean}, {"q", a.q}});
    json rho = {{"numeric", rep.rho.numeric},
                {"theta_star", rep.rho.theta_star},
                {"branch", rep.rho.branch},
                {"boundary_value", rep.rho.boundary_value}};
    rho["closed_form"] = rep.rho.closed_form ? json(*rep.rho.closed_form) : json(nullptr);
    return json{
        {"model", rep.model_name},
        {"nu", rep.moments.nu},
        {"gamma", rep.moments.gamma},
        {"mu", mu},
        {"z1_log_z1", rep.moments.z1_log_z1},
        {"n_log_n", rep.moments.n_log_n},
        {"e_log_gprime", json_or_null(rep.e_log_gprime)},
        {"e_log_gprime_is_minus_inf", !std::isfinite(rep.e_log_gprime)},
        {"e_gprime_log_gprime", rep.e_gprime_log_gprime},
        {"rho", rho},
        {"growth_rate_T", rep.growth_rate ? json(*rep.growth_rate) : json(nullptr)},
        {"L_class",
         {{"degenerate", rep.l_class.degenerate},
          {"reason", to_string(rep.l_class.reason)},
          {"note", rep.l_class.note}}},
        {"W_class",
         {{"mean_one", rep.w_class.mean_one},
          {"reason", to_string(rep.w_class.reason)},
          {"drift", rep.w_class.drift},
          {"note", rep.w_class.note}}},
        {"abprei",
         {{"e_log_mean_direct", rep.abprei.e_log_mean_direct},
          {"e_log_mean_via_env", rep.abprei.e_log_mean_via_env},
          {"e_xlogx_over_mean", rep.abprei.e_xlogx_over_mean},
          {"criticality", to_string(rep.abprei.criticality)},
          {"abpre_subregime", to_string(rep.abprei.abpre_subregime)},
          {"correspondence_branch", to_string(rep.abprei.correspondence_branch)},
          {"hypothesis_holds", rep.abprei.hypothesis_holds},
          {"consistent", rep.abprei.consistent}}},
        {"env", {{"atoms", atoms}}},
    };
}

json experiment_to_json(const ExperimentResult& res) {
    json checks = json::array();
    for (const auto& c : res.checks)
        checks.push_back({{"name", c.name},
                          {"status", to_string(c.status)},
                          {"statistic", json_or_null(c.statistic)},
                          {"threshold", json_or_null(c.threshold)},
                          {"note", c.note}});
    json targets = json::object();
    for (const auto& [k, v] : res.targets) targets[k] = json_or_null(v);
    return json{{"experiment", res.id},
                {"model", res.model},
                {"params", {{"horizon", res.horizon}, {"reps", res.reps}, {"seed", res.seed}}},
                {"targets", targets},
                {"checks", checks},
                {"raw_files", res.raw_files},
                {"pass", res.passed()}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
    if (seed_given) return seed;
    std::uint64_t s = entropy_seed();
    std::cout << "seed: " << s << " (generated; pass --seed to reproduce)\n";
    return s;
}

Caps parse_caps(const std::string& text) {
    Caps caps;
    if (text.empty()) return caps;
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--caps", "expected <parasites,cells>");
    caps.max_parasites = std::stoull(text.substr(0, comma));
    caps.max_cells = std::stoull(text.substr(comma + 1));
    return caps;
}

bool use_jsonl(const std::string& format) {
    if (format == "csv" || format.empty()) return false;
    if (format == "jsonl") return true;
    throw CLI::ValidationError("--format", "expected csv or jsonl");
}

std::string trajectory_jsonl(const std::vector<Trajectory>& trajectories) {
    std::string out;
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const Trajectory& t = trajectories[r];
        for (const auto& row : t.rows) {
            json line{{"rep", r},         {"n", row.n},
                      {"Tstar", row.contaminated}, {"Z", row.parasites},
                      {"W", row.w},       {"S", row.s}};
            line["T"] = row.total_cells ? json(*row.total_cells) : json(nullptr);
            line["status"] = row.n == t.rows.back().n ? to_string(t.status.kind) : "running";
            out += line.dump() + "\n";
        }
    }
    return out;
}

std::string summary_jsonl(const EnsembleSummary& summary) {
    std::string out;
    for (const auto& r : summary.rows) {
        json line{{"n", r.n},
                  {"mean_W", r.mean_w},
                  {"se_W", r.se_w},
                  {"mean_S", r.mean_s},
                  {"se_S", r.se_s},
                  {"mean_log_Tstar", r.mean_log_tstar},
                  {"se", r.se_log_tstar},
                  {"extinct_frac", r.extinct_frac}};
        out += line.dump() + "\n";
    }
    return out;
}

std::string spine_jsonl(const std::vector<SpineRecord>& records) {
    std::string out;
    for (std::size_t r = 0; r < records.size(); ++r)
        for (const auto& row : records[r].rows) {
            bool final_row = row.that == 0;
            json line{{"rep", r}, {"n", row.n}, {"Zspine", row.z_spine}};
            line["That"] = final_row ? json(nullptr) : json(row.that);
            line["Uhat"] = final_row ? json(nullptr) : json(row.uhat);
            line["immigrants"] = final_row ? json(nullptr) : json(row.immigrants);
            out += line.dump() + "\n";
        }
    return out;
}

std::string abpre_jsonl(const std::vector<AbpreTrajectory>& trajs, const EnvAtomStream& stream) {
    std::string out;
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        double prod_mu = 1.0;
        for (const auto& row : trajs[r].rows) {
            json line{{"rep", r}, {"n", row.n}, {"Z", row.z}};
            line["atom_j"] = row.atom_index ? json(stream.atoms()[*row.atom_index].j) : json(nullptr);
            line["atom_k"] = row.atom_index ? json(stream.atoms()[*row.atom_index].k) : json(nullptr);
            line["xi"] = nullptr;
            line["prod_mu"] = prod_mu;
            line["Z_norm"] = prod_mu > 0.0 ? static_cast<double>(row.z) / prod_mu : 0.0;
            out += line.dump() + "\n";
            if (row.atom_index) prod_mu *= stream.atoms()[*row.atom_index].offspring.mean();
        }
    }
    return out;
}

std::string bprei_jsonl(const std::vector<BpreiTrajectory>& trajs, const EnvAtomStream& stream) {
    std::string out;
    for (std::size_t r = 0; r < trajs.size(); ++r)
        for (const auto& row : trajs[r].rows) {
            json line{{"rep", r}, {"n", row.n}, {"Z", row.z}};
            line["atom_j"] = row.atom_index ? json(stream.atoms()[*row.atom_index].j) : json(nullptr);
            line["atom_k"] = row.atom_index ? json(stream.atoms()[*row.atom_index].k) : json(nullptr);
            line["xi"] = row.atom_index ? json(row.xi) : json(nullptr);
            line["prod_mu"] = row.prod_mu;
            line["Z_norm"] = row.z_norm;
            out += line.dump() + "\n";
        }
    return out;
}

int cmd_validate(const std::string& model_path, bool echo, std::uint64_t reps,
                 std::uint64_t horizon, std::uint64_t seed) {
    ModelSpec spec = load_model_file(model_path);
    if (echo) {
        std::cout << model_to_json(spec).dump(2) << "\n";
        return 0;
    }
    AssumptionProbeConfig probe;
    probe.mc_budget = reps;
    probe.horizon = horizon;
    probe.seed = seed;
    AssumptionReport rep = validate_assumptions(spec, probe);
    std::printf("model: %s\n", spec.name.c_str());
    std::printf("%-4s %-14s %s\n", "id", "verdict", "detail");
    bool ok = true;
    for (const auto& r : rep.results) {
        const char* v = r.verdict == Verdict::Pass          ? "pass"
                        : r.verdict == Verdict::McSupported ? "mc-supported"
                                                            : "FAIL";
        if (r.verdict == Verdict::Fail) ok = false;
        std::printf("%-4s %-14s %s\n", r.id.c_str(), v, r.detail.c_str());
    }
    return ok ? 0 : 1;
}

int cmd_analyze(const std::string& model_path, const std::string& norming,
                const std::string& out_dir) {
    ModelSpec spec = load_model_file(model_path);
    RegimeReport rep = analyze(spec);

    std::printf("model: %s\n", rep.model_name.c_str());
    std::printf("  nu          = %.12g\n", rep.moments.nu);
    std::printf("  gamma       = %.12g\n", rep.moments.gamma);
    std::printf("  E Z1 log Z1 = %.12g\n", rep.moments.z1_log_z1);
    std::printf("  E N log N   = %.12g\n", rep.moments.n_log_n);
    if (std::isfinite(rep.e_log_gprime))
        std::printf("  E log g'    = %.12g\n", rep.e_log_gprime);
    else
        std::printf("  E log g'    = -inf\n");
    std::printf("  E g' log g' = %.12g\n", rep.e_gprime_log_gprime);
    std::printf("  rho         = %.12g (theta* = %.6g, branch %d", rep.rho.numeric,
                rep.rho.theta_star, rep.rho.branch);
    if (rep.rho.closed_form)
        std::printf(", closed form %.12g)\n", *rep.rho.closed_form);
    else
        std::printf(", boundary form %.12g reported for comparison)\n", rep.rho.boundary_value);
    if (rep.growth_rate) std::printf("  log(nu rho) = %.12g\n", *rep.growth_rate);
    std::printf("  L class     = %s%s%s\n",
                rep.l_class.degenerate ? "DegenerateZero(" : "NondegenerateOnSurv",
                rep.l_class.degenerate ? to_string(rep.l_class.reason) : "",
                rep.l_class.degenerate ? ")" : "");
    std::printf("  W class     = %s (drift %.12g)\n", rep.w_class.mean_one ? "MeanOne" : "MeanZero",
                rep.w_class.drift);
    std::printf("  spinal environment: E log mean = %.12g -> %s\n", rep.abprei.e_log_mean_direct,
                to_string(rep.abprei.criticality));
    std::printf("  E[(X log+ X)/mu] (spinal env) = %.12g\n", rep.abprei.e_xlogx_over_mean);

    json doc = regime_to_json(rep);
    std::string norming_csv;
    if (!norming.empty()) {
        double a = 0.0;
        unsigned long long n = 0;
        if (std::sscanf(norming.c_str(), "a=%lf n=%llu", &a, &n) != 2)
            throw CLI::ValidationError("--norming", "expected \"a=<float> n=<int>\"");
        NormingSequence seq = heyde_seneta_norming(spec.cell_law, a, n);
        norming_csv = "n,c_n,ratio\n";
        for (std::size_t i = 0; i < seq.values.size(); ++i) {
            norming_csv += std::to_string(i);
            norming_csv += ',';
            norming_csv += fmt_double(seq.values[i]);
            norming_csv += ',';
            if (i > 0) norming_csv += fmt_double(seq.ratios[i - 1]);
            norming_csv += '\n';
        }
        std::cout << norming_csv;
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "regime.json", doc.dump(2) + "\n");
        if (!norming_csv.empty()) write_file(fs::path(out_dir) / "norming.csv", norming_csv);
    } else {
        std::cout << doc.dump(2) << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& model_path, std::uint64_t horizon, std::uint64_t reps,
                 std::uint64_t seed, const std::string& caps_text, bool track_empty,
                 unsigned threads, const std::string& out_dir, const std::string& format) {
    ModelSpec spec = load_model_file(model_path);
    bool jsonl = use_jsonl(format);
    BatchParams bp;
    bp.reps = reps;
    bp.run.horizon = horizon;
    bp.run.caps = parse_caps(caps_text);
    bp.run.track_empty = track_empty;
    bp.threads = threads;
    bp.capture_trajectories = true;
    BatchResult batch = run_batch(spec, bp, seed);
    std::string traj = jsonl ? trajectory_jsonl(batch.trajectories) : trajectory_csv(batch.trajectories);
    std::string summary = jsonl ? summary_jsonl(batch.summary) : summary_csv(batch.summary);
    const char* ext = jsonl ? "jsonl" : "csv";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / (std::string("trajectories.") + ext), traj);
        write_file(fs::path(out_dir) / (std::string("summary.") + ext), summary);
        std::printf("wrote %s/trajectories.%s and %s/summary.%s\n", out_dir.c_str(), ext,
                    out_dir.c_str(), ext);
    } else {
        std::cout << summary;
    }
    return 0;
}

int cmd_spine(const std::string& model_path, std::uint64_t horizon, std::uint64_t reps,
              std::uint64_t seed, bool full_tree, std::uint64_t depth, std::uint64_t cap,
              const std::string& out_dir, const std::string& format) {
    ModelSpec spec = load_model_file(model_path);
    if (full_tree) {
        for (std::uint64_t r = 0; r < reps; ++r) {
            Rng rng = derive_stream(seed, stream_tag::spine, r);
            SizeBiasedTree tree = run_sizebiased_tree(spec, depth, cap, rng);
            json doc;
            doc["rep"] = r;
            doc["truncated"] = tree.truncated;
            json gens = json::array();
            for (const auto& g : tree.generations) {
                json cells = json::object();
                for (const auto& [label, z] : g.cells) cells[label.empty() ? "root" : label] = z;
                gens.push_back({{"cells", cells},
                                {"spine", g.spine_label.empty() ? "root" : g.spine_label},
                                {"parasites", g.parasites},
                                {"w_hat", g.w_hat}});
            }
            doc["generations"] = gens;
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                write_file(fs::path(out_dir) / ("tree_" + std::to_string(r) + ".json"),
                           doc.dump(2) + "\n");
            } else {
                std::cout << doc.dump() << "\n";
            }
        }
        return 0;
    }
    std::vector<SpineRecord> records;
    records.reserve(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = derive_stream(seed, stream_tag::spine, r);
        records.push_back(run_spine(spec, horizon, rng));
    }
    bool jsonl = use_jsonl(format);
    std::string data = jsonl ? spine_jsonl(records) : spine_csv(records);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / (jsonl ? "spine.jsonl" : "spine.csv"), data);
    } else {
        std::cout << data;
    }
    return 0;
}

EnvAtomStream stream_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError("cannot open stream file: " + path);
    json doc = json::parse(in);
    if (!doc.contains("atoms") || !doc["atoms"].is_array())
        throw ModelParseError("stream file: expected {atoms: [...]}");
    std::vector<EnvAtom> atoms;
    for (const auto& aj : doc["atoms"]) {
        EnvAtom atom;
        atom.j = aj.value("j", 0);
        atom.k = aj.value("k", 0);
        atom.weight = aj.at("weight").get<double>();
        std::vector<std::pair<std::uint64_t, double>> off;
        for (const auto& e : aj.at("offspring"))
            off.emplace_back(e.at("v").get<std::uint64_t>(), e.at("p").get<double>());
        atom.offspring = DiscreteLaw(std::move(off));
        if (aj.contains("immigration")) {
            std::vector<std::pair<std::uint64_t, double>> imm;
            for (const auto& e : aj["immigration"])
                imm.emplace_back(e.at("v").get<std::uint64_t>(), e.at("p").get<double>());
            atom.immigration = DiscreteLaw(std::move(imm));
        }
        atoms.push_back(std::move(atom));
    }
    return EnvAtomStream(std::move(atoms));
}

int cmd_abpre(const std::string& model_path, std::uint64_t horizon, std::uint64_t reps,
              std::uint64_t seed, const std::string& out_dir, const std::string& format) {
    ModelSpec spec = load_model_file(model_path);
    EnvAtomStream stream = abpre_stream(spec);
    std::vector<AbpreTrajectory> trajs;
    trajs.reserve(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = derive_stream(seed, stream_tag::abpre, r);
        trajs.push_back(run_abpre(stream, horizon, rng));
    }
    bool jsonl = use_jsonl(format);
    std::string data = jsonl ? abpre_jsonl(trajs, stream) : abpre_csv(trajs, stream);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / (jsonl ? "abpre.jsonl" : "abpre.csv"), data);
    } else {
        std::cout << data;
    }
    return 0;
}

int cmd_bprei(const std::string& model_path, const std::string& stream_path, std::uint64_t horizon,
              std::uint64_t reps, std::uint64_t seed, const std::string& out_dir,
              const std::string& format) {
    EnvAtomStream stream;
    if (!stream_path.empty()) {
        stream = stream_from_file(stream_path);
    } else if (!model_path.empty()) {
        stream = abprei_stream(load_model_file(model_path));
    } else {
        throw CLI::ValidationError("bprei", "pass --model (spinal environment) or --stream");
    }
    std::vector<BpreiTrajectory> trajs;
    trajs.reserve(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng = derive_stream(seed, stream_tag::bprei, r);
        trajs.push_back(run_bprei(stream, horizon, rng));
    }
    bool jsonl = use_jsonl(format);
    std::string data = jsonl ? bprei_jsonl(trajs, stream) : bprei_csv(trajs, stream);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / (jsonl ? "bprei.jsonl" : "bprei.csv"), data);
    } else {
        std::cout << data;
    }
    return 0;
}

int cmd_experiment(const std::string& name, const std::string& model_path, std::uint64_t horizon,
                   std::uint64_t reps, std::uint64_t seed, unsigned threads, double norming_a,
                   bool norming_a_set, const std::string& caps_text, const std::string& out_dir) {
    ModelSpec spec = load_model_file(model_path);
    ExperimentParams params;
    params.horizon = horizon;
    params.reps = reps;
    params.seed = seed;
    params.threads = threads;
    if (!caps_text.empty()) params.caps = parse_caps(caps_text);
    if (norming_a_set) params.norming_a = norming_a;

    RawSink sink;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        sink = [&out_dir](const std::string& file, const std::string& content) {
            write_file(fs::path(out_dir) / file, content);
        };
    }
    ExperimentResult res = run_experiment(name, spec, params, sink);
    json doc = experiment_to_json(res);
    for (const auto& c : res.checks)
        std::printf("[%s] %-28s %-12s stat=%.10g thr=%.10g  %s\n", res.id.c_str(), c.name.c_str(),
                    to_string(c.status), c.statistic, c.threshold, c.note.c_str());
    if (!out_dir.empty())
        write_file(fs::path(out_dir) / (res.id + "_result.json"), doc.dump(2) + "\n");
    else
        std::cout << doc.dump(2) << "\n";
    return res.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"branching-within-branching simulation and analysis toolkit"};
    app.require_subcommand(1);

    std::string model_path, out_dir, caps_text, norming_text, stream_path, exp_name;
    std::string format = "csv";
    std::uint64_t horizon = 20, reps = 1000, seed = 0, depth = 4, node_cap = 100000;
    unsigned threads = 0;
    bool echo = false, track_empty = false, full_tree = false, list_experiments = false;
    double norming_a = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", model_path, "model file (JSON)");
        sub->add_option("--seed", seed, "run seed (generated and printed when absent)");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        sub->add_option("--out", out_dir, "output directory for raw files");
        sub->add_option("--format", format, "trajectory output format: csv | jsonl");
        return sub;
    };

    auto* validate = add_common(app.add_subcommand("validate", "check a model and its assumptions"));
    validate->add_flag("--echo", echo, "re-emit the parsed model as JSON and exit");
    validate->add_option("--reps", reps, "survival-probe replicates")->default_val(10000);
    validate->add_option("--horizon", horizon, "survival-probe horizon")->default_val(30);

    auto* analyze_cmd = add_common(app.add_subcommand("analyze", "exact regime analysis"));
    analyze_cmd->add_option("--norming", norming_text,
                            "emit the norming sequence: \"a=<float> n=<int>\"");

    auto* simulate = add_common(app.add_subcommand("simulate", "forward population simulation"));
    simulate->add_option("--horizon", horizon, "number of generations");
    simulate->add_option("--reps", reps, "replicates");
    simulate->add_option("--caps", caps_text, "caps <parasites,cells>");
    simulate->add_flag("--track-empty", track_empty, "track parasite-free live cells");

    auto* spine_cmd = add_common(app.add_subcommand("spine", "spinal-cell simulation"));
    spine_cmd->add_option("--horizon", horizon, "number of generations");
    spine_cmd->add_option("--reps", reps, "replicates");
    spine_cmd->add_flag("--full-tree", full_tree, "materialize whole size-biased trees");
    spine_cmd->add_option("--depth", depth, "tree depth (with --full-tree)");
    spine_cmd->add_option("--cap", node_cap, "node cap per tree (with --full-tree)");

    auto* abpre_cmd = add_common(app.add_subcommand("abpre", "parasites along a random cell line"));
    abpre_cmd->add_option("--horizon", horizon, "number of generations");
    abpre_cmd->add_option("--reps", reps, "replicates");

    auto* bprei_cmd =
        add_common(app.add_subcommand("bprei", "branching in random environment with immigration"));
    bprei_cmd->add_option("--horizon", horizon, "number of generations");
    bprei_cmd->add_option("--reps", reps, "replicates");
    bprei_cmd->add_option("--stream", stream_path, "environment stream file (JSON)");

    auto* exp_cmd = add_common(app.add_subcommand("experiment", "named verification experiments"));
    exp_cmd->add_option("--name", exp_name, "experiment id (see --list)");
    exp_cmd->add_option("--horizon", horizon, "number of generations");
    exp_cmd->add_option("--reps", reps, "replicates");
    exp_cmd->add_option("--caps", caps_text, "caps <parasites,cells>");
    auto* norming_a_opt = exp_cmd->add_option("--norming-a", norming_a, "norming start value");
    exp_cmd->add_flag("--list", list_experiments, "print the experiment catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << "error[usage]: " << e.what() << "\n";
        return 2;
    }

    try {
        bool seed_given = false;
        for (auto* sub : {validate, analyze_cmd, simulate, spine_cmd, abpre_cmd, bprei_cmd, exp_cmd})
            if (sub->parsed() && sub->count("--seed") > 0) seed_given = true;

        if (validate->parsed())
            return cmd_validate(model_path, echo, reps, horizon,
                                echo ? seed : resolve_seed(seed_given, seed));
        if (analyze_cmd->parsed()) return cmd_analyze(model_path, norming_text, out_dir);
        if (simulate->parsed())
            return cmd_simulate(model_path, horizon, reps, resolve_seed(seed_given, seed),
                                caps_text, track_empty, threads, out_dir, format);
        if (spine_cmd->parsed())
            return cmd_spine(model_path, horizon, reps, resolve_seed(seed_given, seed), full_tree,
                             depth, node_cap, out_dir, format);
        if (abpre_cmd->parsed())
            return cmd_abpre(model_path, horizon, reps, resolve_seed(seed_given, seed), out_dir,
                             format);
        if (bprei_cmd->parsed())
            return cmd_bprei(model_path, stream_path, horizon, reps,
                             resolve_seed(seed_given, seed), out_dir, format);
        if (exp_cmd->parsed()) {
            if (list_experiments) {
                for (const auto& e : experiment_catalog())
                    std::printf("%-10s %s\n", e.id.c_str(), e.description.c_str());
                return 0;
            }
            if (exp_name.empty()) throw CLI::ValidationError("experiment", "pass --name <id> or --list");
            return cmd_experiment(exp_name, model_path, horizon, reps,
                                  resolve_seed(seed_given, seed), threads, norming_a,
                                  norming_a_opt->count() > 0, caps_text, out_dir);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error[usage]: " << e.what() << "\n";
        return 2;
    } catch (const ModelParseError& e) {
        std::cerr << "error[model]: " << e.what() << "\n";
        return 2;
    } catch (const ExpansionTooLarge& e) {
        std::cerr << "error[expansion]: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error[precondition]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
