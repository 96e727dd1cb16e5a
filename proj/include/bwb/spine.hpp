#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bwb/model.hpp"
#include "bwb/rng.hpp"

namespace bwb {

/// Exact law of the spinal cell's daughter count: P(k) = p_k sum_j mu_{j,k} / gamma.
DiscreteLaw spinal_daughter_count_law(const ModelSpec& spec);

/// Law of the spinal parasite's offspring vector given k daughters: the
/// kernel table reweighted by its total, (sum x / sum mu) P(x).
VectorLaw spinal_offspring_law(const ModelSpec& spec, std::uint64_t k,
                               std::size_t table_cap = kDefaultTableCap);

/// One step of the spinal cell under the size-biased construction.
struct SpinalStep {
    std::uint64_t k = 0;                    // daughter count of the spinal cell
    std::uint64_t l = 0;                    // 1-based daughter hosting the next spinal parasite
    std::vector<std::uint64_t> daughters;   // parasite counts of all k daughters
    std::uint64_t spinal_component = 0;     // offspring of the spinal parasite landing in l
    std::uint64_t immigrants = 0;           // spinal_component - 1
};

/// Samples (T-hat, U-hat, daughter counts) for a spinal cell holding z >= 1
/// parasites: the spinal parasite reproduces by the size-biased law, the
/// uniform pick over its offspring (in kernel-vector order) selects the next
/// spinal cell, and the z-1 co-resident parasites reproduce ordinarily.
SpinalStep sample_spinal_step(std::uint64_t z, const ModelSpec& spec, Rng& rng,
                              std::size_t table_cap = kDefaultTableCap);

/// Exact one-step law of (k, l, daughter vector) for a spinal cell with z
/// parasites: atom weight p_k z_l / (z gamma) times the z-fold kernel
/// convolution mass. Throws ExpansionTooLarge past the cap.
struct SpinalStepLaw {
    std::uint64_t z = 0;
    struct Atom {
        std::uint64_t k = 0;
        std::uint64_t l = 0;  // 1-based
        std::vector<std::uint64_t> daughters;
        double prob = 0.0;
    };
    std::vector<Atom> atoms;

    DiscreteLaw marginal_daughter_count() const;
    double total_mass() const;
};

SpinalStepLaw spinal_step_law(std::uint64_t z, const ModelSpec& spec,
                              std::size_t table_cap = kDefaultTableCap);

struct SpineRow {
    std::uint64_t n = 0;
    std::uint64_t z_spine = 0;     // parasites in the spinal cell at time n
    std::uint64_t that = 0;        // daughter count drawn at step n (0 on the final row)
    std::uint64_t uhat = 0;        // daughter chosen at step n (0 on the final row)
    std::uint64_t immigrants = 0;  // spinal parasite's extra offspring at step n
};

struct SpineRecord {
    std::vector<SpineRow> rows;  // horizon+1 rows; the last carries state only
};

/// Iterates the spinal cell only; the off-spine population is never built.
SpineRecord run_spine(const ModelSpec& spec, std::uint64_t horizon, Rng rng);

/// One generation of the full size-biased tree, keyed by Ulam-Harris labels
/// (dot-separated, root ""). Live parasite-free cells appear with count 0;
/// absent labels are dead.
struct SizeBiasedGeneration {
    std::map<std::string, std::uint64_t> cells;
    std::string spine_label;
    std::uint64_t parasites = 0;  // total over the generation
    double w_hat = 0.0;           // parasites / gamma^n
};

struct SizeBiasedTree {
    std::vector<SizeBiasedGeneration> generations;
    bool truncated = false;  // node cap hit before reaching the depth
};

/// Materializes the size-biased tree to the given depth: the spinal cell
/// reproduces by the size-biased step, every other cell ordinarily.
SizeBiasedTree run_sizebiased_tree(const ModelSpec& spec, std::uint64_t depth,
                                   std::uint64_t node_cap, Rng rng);

}  // namespace bwb
