#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bwb/rng.hpp"

namespace bwb {

/// Tolerances for probability vectors: a total mass within `renorm` of 1 is
/// silently renormalized (absorbs decimal rounding in config files), a larger
/// deviation is a hard error.
constexpr double kMassTolerance = 1e-12;
constexpr double kRenormTolerance = 1e-9;

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Finite-support probability law on the nonnegative integers.
/// Atoms are kept sorted by value with strictly positive mass; a cumulative
/// table is built once so sampling is const and thread-safe.
class DiscreteLaw {
  public:
    DiscreteLaw() = default;
    explicit DiscreteLaw(std::vector<std::pair<std::uint64_t, double>> atoms);

    static DiscreteLaw point(std::uint64_t v) { return DiscreteLaw({{v, 1.0}}); }

    const std::vector<std::pair<std::uint64_t, double>>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t support_size() const { return atoms_.size(); }
    std::uint64_t max_value() const;

    double mass_at(std::uint64_t v) const;
    double p_zero() const { return mass_at(0); }
    double mean() const;
    double second_moment() const;
    /// E[V log V] with the 0*log 0 = 0 convention.
    double mean_log() const;

    DiscreteLaw convolve(const DiscreteLaw& other, std::size_t atom_cap = 0) const;
    DiscreteLaw power_convolve(std::uint64_t n, std::size_t atom_cap = 0) const;
    /// Law with mass v*p(v)/mean; requires mean > 0.
    DiscreteLaw size_biased() const;

    std::uint64_t sample(Rng& rng) const;

    /// Sum of `count` iid draws. Looped for small counts; for large counts
    /// the per-atom occupation numbers are drawn from the exact multinomial
    /// via sequential binomials, which is the same law.
    std::uint64_t sample_iid_sum(std::uint64_t count, Rng& rng) const;

  private:
    std::vector<std::pair<std::uint64_t, double>> atoms_;
    std::vector<double> cdf_;
    void build_cdf();
};

/// Finite law on N0^k given as an explicit table of (vector, probability).
class VectorLaw {
  public:
    VectorLaw() = default;
    VectorLaw(std::size_t dim, std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms);

    std::size_t dim() const { return dim_; }
    const std::vector<std::pair<std::vector<std::uint64_t>, double>>& atoms() const { return atoms_; }
    std::size_t support_size() const { return atoms_.size(); }

    DiscreteLaw marginal(std::size_t j) const;
    /// Law of the componentwise total.
    DiscreteLaw sum_law() const;
    double component_mean(std::size_t j) const;
    double total_mean() const;

    VectorLaw convolve(const VectorLaw& other, std::size_t atom_cap = 0) const;
    VectorLaw power_convolve(std::uint64_t n, std::size_t atom_cap = 0) const;

    /// Reweighted by the vector total: mass (sum x / E sum) * p(x).
    /// Atoms with zero total drop out; requires E sum > 0.
    VectorLaw sum_size_biased() const;

    double mass_of(const std::vector<std::uint64_t>& x) const;

    const std::vector<std::uint64_t>& sample(Rng& rng) const;

    /// Componentwise sum of `count` iid vector draws, added into `acc`
    /// (which must have length dim). Multinomial fast path for large counts.
    void sample_iid_sum_into(std::uint64_t count, Rng& rng, std::vector<std::uint64_t>& acc) const;

  private:
    std::size_t dim_ = 0;
    std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms_;
    std::vector<double> cdf_;
    void build_cdf();
};

/// Thrown when an exact-law expansion would exceed the configured cap.
class ExpansionTooLarge : public std::runtime_error {
  public:
    explicit ExpansionTooLarge(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bwb
