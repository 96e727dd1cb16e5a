#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "bwb/model.hpp"
#include "bwb/rng.hpp"

namespace bwb {

struct Caps {
    std::uint64_t max_parasites = 10'000'000;
    std::uint64_t max_cells = 1'000'000;
};

/// Aggregated generation state: cells are exchangeable given their parasite
/// count, so only the count-of-cells per parasite load is stored. The map
/// never holds z = 0; parasite-free live cells are tracked separately when
/// requested.
struct PopulationState {
    std::map<std::uint64_t, std::uint64_t> contaminated;  // z >= 1 -> #cells
    std::uint64_t empty_cells = 0;  // meaningful only when empties are tracked
    std::uint64_t generation = 0;

    std::uint64_t contaminated_count() const;
    std::uint64_t parasite_count() const;

    static PopulationState initial() { return PopulationState{{{1, 1}}, 0, 0}; }
};

enum class TerminalKind { Alive, Extinct, CapHit };

struct TerminalStatus {
    TerminalKind kind = TerminalKind::Alive;
    std::uint64_t at = 0;
};

struct TrajectoryRow {
    std::uint64_t n = 0;
    std::optional<std::uint64_t> total_cells;  // present when empties are tracked
    std::uint64_t contaminated = 0;            // T*_n
    std::uint64_t parasites = 0;               // Z_n
    double w = 0.0;                            // Z_n / gamma^n
    double s = 0.0;                            // T*_n / nu^n
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    TerminalStatus status;
};

struct StepError {
    enum class Kind { ParasiteCap, CellCap } kind;
};

/// One exact generation step: every contaminated cell draws its daughter
/// count and one kernel vector per parasite; empty live cells, when tracked,
/// reproduce as a plain cell tree. Returns the error instead of a state when
/// a cap would be exceeded.
std::optional<StepError> step(const PopulationState& state, const ModelSpec& spec, Rng& rng,
                              const Caps& caps, bool track_empty, PopulationState* out);

struct RunParams {
    std::uint64_t horizon = 20;
    Caps caps;
    bool track_empty = false;
};

Trajectory run(const ModelSpec& spec, const RunParams& params, Rng rng);

/// Per-generation ensemble statistics. Replicates that ended by extinction
/// contribute zero W and S beyond their last row; replicates truncated by a
/// cap drop out of the statistics past the truncation point.
struct SummaryRow {
    std::uint64_t n = 0;
    std::size_t reps_valid = 0;
    double mean_w = 0.0, se_w = 0.0;
    double mean_s = 0.0, se_s = 0.0;
    std::size_t survivors = 0;
    double mean_log_tstar = 0.0, se_log_tstar = 0.0;  // survivors only
    double extinct_frac = 0.0;
    double caphit_frac = 0.0;
};

struct EnsembleSummary {
    std::vector<SummaryRow> rows;
};

struct BatchParams {
    std::uint64_t reps = 1;
    RunParams run;
    unsigned threads = 0;  // 0: hardware concurrency
    bool capture_trajectories = false;
};

struct BatchResult {
    EnsembleSummary summary;
    std::vector<Trajectory> trajectories;  // filled when capture_trajectories
};

/// Replicate r draws its stream from (seed, engine tag, r); outputs are
/// bitwise identical for fixed (seed, reps) whatever the thread count.
BatchResult run_batch(const ModelSpec& spec, const BatchParams& params, std::uint64_t seed);

const char* to_string(TerminalKind k);

}  // namespace bwb
