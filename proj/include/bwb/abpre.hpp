#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "bwb/analysis.hpp"
#include "bwb/model.hpp"
#include "bwb/rng.hpp"

namespace bwb {

/// One environment atom of a branching process in iid random environment:
/// an offspring law and, for processes with immigration, an immigrant law.
struct EnvAtom {
    std::uint64_t j = 0;  // 1-based component index (0 for synthetic atoms)
    std::uint64_t k = 0;
    double weight = 0.0;
    DiscreteLaw offspring;
    std::optional<DiscreteLaw> immigration;
};

/// Seeded iid sampler over environment atoms.
class EnvAtomStream {
  public:
    EnvAtomStream() = default;
    explicit EnvAtomStream(std::vector<EnvAtom> atoms);

    const std::vector<EnvAtom>& atoms() const { return atoms_; }
    std::size_t sample_index(Rng& rng) const;

    bool has_immigration() const;
    double p_immigration_positive() const;
    /// E log of the offspring mean; -infinity with zero-mean atoms.
    double e_log_mean() const;

  private:
    std::vector<EnvAtom> atoms_;
    std::vector<double> cdf_;
};

/// Parasites along a uniformly chosen cell line: atoms (j,k) with weight
/// p_k / nu and the marginal component laws, no immigration.
EnvAtomStream abpre_stream(const ModelSpec& spec);

/// Spinal-cell parasite count minus one: atoms (j,k) with weight
/// p_k mu_{j,k} / gamma, ordinary component offspring, and immigrant law
/// equal to the size-biased component minus one. Zero-mean atoms drop out.
EnvAtomStream abprei_stream(const ModelSpec& spec);

struct AbpreRow {
    std::uint64_t n = 0;
    std::uint64_t z = 0;
    // Atom drawn at step n (transition to n+1); absent on the final row.
    std::optional<std::size_t> atom_index;
};

struct AbpreTrajectory {
    std::vector<AbpreRow> rows;
};

/// Z'_0 = 1; each step draws an atom and replaces z by the sum of z iid
/// offspring draws from it. Zero is absorbing.
AbpreTrajectory run_abpre(const EnvAtomStream& stream, std::uint64_t horizon, Rng rng);

struct BpreiRow {
    std::uint64_t n = 0;
    std::uint64_t z = 0;
    std::optional<std::size_t> atom_index;  // drawn at step n
    std::uint64_t xi = 0;                   // immigrants at step n
    double prod_mu = 1.0;                   // realized mean product up to n
    double z_norm = 0.0;                    // z / prod_mu
};

struct BpreiTrajectory {
    std::vector<BpreiRow> rows;
};

/// Z_0 = 0; Z_{n+1} = sum of Z_n iid offspring draws + xi_n, everything
/// conditioned on the atom drawn at step n. Requires P(xi > 0) > 0.
BpreiTrajectory run_bprei(const EnvAtomStream& stream, std::uint64_t horizon, Rng rng);

/// (max - min) / mean of z_norm over rows n in [lo, hi].
double normalized_tail_variation(const BpreiTrajectory& traj, std::uint64_t lo, std::uint64_t hi);

/// Both sides of nu * P(Z'_1 > 0) = E T*_1, each computed exactly from its
/// own representation (environment atoms vs kernel marginals).
std::pair<double, double> contaminated_mean_identity_exact_n1(const ModelSpec& spec);

struct IdentityRow {
    std::uint64_t n = 0;
    double lhs = 0.0;  // nu^n * estimated P(Z'_n > 0)
    double lhs_lo = 0.0, lhs_hi = 0.0;
    double rhs = 0.0;  // estimated E T*_n
    double rhs_lo = 0.0, rhs_hi = 0.0;
    bool ci_overlap = false;
};

struct IdentityCheck {
    std::vector<IdentityRow> rows;
    bool all_overlap = true;
};

/// Monte-Carlo comparison of nu^n P(Z'_n > 0) with E T*_n at the given n
/// values; both sides get independent streams and 99% intervals.
IdentityCheck contaminated_mean_identity(const ModelSpec& spec,
                                         const std::vector<std::uint64_t>& n_values,
                                         std::uint64_t reps, std::uint64_t seed,
                                         unsigned threads = 0);

struct DecayRow {
    std::uint64_t n = 0;
    double mean_ratio = 0.0;  // average of c^{-n} E(Z_n | environment, immigration)
};

struct DecayTable {
    double c = 1.0;
    std::vector<DecayRow> rows;
};

/// Conditional-mean decay: for frozen environment and immigration draws the
/// inner expectation e_{n+1} = e_n mu + xi is exact, and c^{-n} e_n is
/// averaged over outer replicates. Requires E log mu < log c.
DecayTable conditional_mean_decay(const EnvAtomStream& stream, double c, std::uint64_t horizon,
                                  std::uint64_t reps, std::uint64_t seed);

/// Exact one-step law of the process from state z, jointly with the atom:
/// per atom (weight, law of next state).
std::vector<std::pair<const EnvAtom*, DiscreteLaw>> one_step_joint_law(
    const EnvAtomStream& stream, std::uint64_t z, std::size_t atom_cap = kDefaultTableCap);

}  // namespace bwb
