#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bwb/analysis.hpp"
#include "bwb/engine.hpp"
#include "bwb/model.hpp"

namespace bwb {

enum class CheckStatus { Pass, Fail, Inconclusive, Info };

struct ExperimentCheck {
    std::string name;
    CheckStatus status = CheckStatus::Info;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string note;
};

/// Statistical defaults; overridable per run and chosen so the shipped
/// budgets pass with large margin under the null.
struct Thresholds {
    double growth_tolerance = 0.1;        // |(1/n) log T* - log(nu rho)|
    double stabilization_rel = 0.10;      // relative variation over the last third
    double decay_fraction = 0.05;         // median S_h below this times S_0
    double small_mass_frac = 0.05;        // survivors allowed near zero
    double small_mass_scale = 1e-3;       // "near zero" means below scale * mean
    double se_multiplier = 3.0;           // Kesten-Stigum mean window
    double mean_w_bound = 0.1;            // degenerate-W bound at the horizon
    double w_root_tolerance = 0.05;       // |mean W^(1/n) - 1|
    double chi2_alpha = 1e-3;
    std::uint64_t min_survivors = 100;
};

struct ExperimentParams {
    std::uint64_t horizon = 25;
    std::uint64_t reps = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::optional<Caps> caps;       // engine caps override
    std::optional<double> norming_a;  // start of the norming recursion (thm23)
    Thresholds thresholds;
};

/// Sink for raw outputs (filename, file content); experiments format their
/// raw CSVs through it so reruns can be compared byte for byte.
using RawSink = std::function<void(const std::string&, const std::string&)>;

struct ExperimentResult {
    std::string id;
    std::string model;
    std::uint64_t horizon = 0, reps = 0, seed = 0;
    std::vector<std::pair<std::string, double>> targets;
    std::vector<ExperimentCheck> checks;
    std::vector<std::string> raw_files;

    bool passed() const;
    void add(ExperimentCheck c) { checks.push_back(std::move(c)); }
};

ExperimentResult exp_thm21(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});
ExperimentResult exp_thm22(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});
ExperimentResult exp_thm23(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});
ExperimentResult exp_thm24_25(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});
ExperimentResult exp_thm26(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});
ExperimentResult exp_lemma43(const ModelSpec& spec, const ExperimentParams& p, RawSink sink = {});

struct CatalogEntry {
    std::string id;
    std::string description;
};

const std::vector<CatalogEntry>& experiment_catalog();

/// Dispatch by catalog id; throws std::invalid_argument for unknown ids.
ExperimentResult run_experiment(const std::string& id, const ModelSpec& spec,
                                const ExperimentParams& p, RawSink sink = {});

const char* to_string(CheckStatus s);

}  // namespace bwb
