#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bwb/discrete.hpp"
#include "bwb/rng.hpp"

namespace bwb {

/// Default cap on the number of atoms when a kernel is expanded to an
/// explicit table (product kernels, multi-parasite convolutions).
constexpr std::size_t kDefaultTableCap = 1'000'000;

/// Offspring distribution of cells. Finite support, max k below 2^16.
class CellOffspringLaw {
  public:
    CellOffspringLaw() = default;
    explicit CellOffspringLaw(std::vector<std::pair<std::uint64_t, double>> entries);

    const DiscreteLaw& law() const { return law_; }
    std::uint64_t max_k() const { return law_.max_value(); }
    double p(std::uint64_t k) const { return law_.mass_at(k); }
    double nu() const { return law_.mean(); }
    /// E N 1{N <= c}.
    double truncated_mean(double c) const;
    /// E N log N (always finite on a finite support).
    double n_log_n() const { return law_.mean_log(); }

  private:
    DiscreteLaw law_;
};

/// How one parasite's offspring are shared among the k daughter cells of its
/// host: either an explicit table over N0^k or a product of k independent
/// one-dimensional laws.
class SharingKernel {
  public:
    SharingKernel() = default;
    static SharingKernel table(std::uint64_t k, VectorLaw law);
    static SharingKernel product(std::uint64_t k, std::vector<DiscreteLaw> components);

    std::uint64_t k() const { return k_; }
    bool is_table() const { return std::holds_alternative<VectorLaw>(repr_); }

    /// Component mean mu_{j,k} (j is 1-based below the public surface,
    /// 0-based here).
    double component_mean(std::size_t j) const;
    DiscreteLaw component_marginal(std::size_t j) const;
    /// Law of the parasite's total offspring count.
    DiscreteLaw sum_law() const;
    double total_mean() const;

    /// Explicit table form (computed on demand for product kernels);
    /// throws ExpansionTooLarge above the cap.
    VectorLaw as_table(std::size_t cap = kDefaultTableCap) const;

    /// One kernel draw (componentwise offspring of a single parasite).
    void sample_into(Rng& rng, std::vector<std::uint64_t>& out) const;

    /// Componentwise daughter totals of `z` iid kernel draws, added into
    /// `daughters` (length k). Exact law; large z uses the multinomial form.
    void sample_sum_into(Rng& rng, std::uint64_t z, std::vector<std::uint64_t>& daughters) const;

  private:
    std::uint64_t k_ = 0;
    std::variant<std::monostate, VectorLaw, std::vector<DiscreteLaw>> repr_;
};

/// A full model: cell offspring law plus one sharing kernel per supported k.
struct ModelSpec {
    std::string name;
    CellOffspringLaw cell_law;
    std::map<std::uint64_t, SharingKernel> kernels;

    /// Checks the kernel map covers exactly the cell-law support (k >= 1).
    void validate() const;
    const SharingKernel& kernel(std::uint64_t k) const;
};

/// Exact first moments and log-moments.
struct MomentTable {
    double nu = 0.0;                                // E N
    double gamma = 0.0;                             // E Z_1
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> mu;  // (j,k) -> mean, 1-based j
    double z1_log_z1 = 0.0;                         // E Z_1 log Z_1
    double n_log_n = 0.0;                           // E N log N
};

/// Exact over the finite supports; sums use kernel marginals and the law of
/// the per-parasite total, so no full table expansion is needed here.
MomentTable compute_moments(const ModelSpec& spec);

enum class Verdict { Pass, Fail, McSupported };

struct AssumptionResult {
    std::string id;
    Verdict verdict = Verdict::Fail;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionResult> results;
    bool a1_to_a4_pass() const;
    const AssumptionResult& at(const std::string& id) const;
};

struct AssumptionProbeConfig {
    std::uint64_t mc_budget = 10'000;
    std::uint64_t horizon = 30;
    std::uint64_t seed = 1;
};

/// A1-A4 decided exactly from the laws; A5 (positive survival probability)
/// is reported as a heuristic: a hard failure when gamma <= 1, otherwise a
/// Monte-Carlo supported verdict with the estimated survival frequency.
AssumptionReport validate_assumptions(const ModelSpec& spec,
                                      const AssumptionProbeConfig& probe = {});

/// Exact detector for the two-parasite spreading condition: some k in the
/// cell support admits kernel vectors x, y and daughters j != j' with
/// x_j > 0 and y_{j'} > 0.
bool two_parasite_spread_possible(const ModelSpec& spec);

// Canonical test models shipped with the repo.
namespace fixtures {
ModelSpec bin2();
ModelSpec asym();
ModelSpec weak();
ModelSpec sub();
/// Supercritical model whose parasite martingale limit degenerates to zero:
/// a rare single-daughter kernel boosts one line far above the mean growth.
ModelSpec boost();
}  // namespace fixtures

}  // namespace bwb
