#include "bwb/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bwb {

namespace {

void check_and_renormalize(double total, double* scale, const char* what) {
    double dev = std::abs(total - 1.0);
    if (dev > kRenormTolerance)
        throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                    std::to_string(total) + ", outside tolerance");
    // Within the hard tolerance the mass is left untouched, keeping parsed
    // models bit-stable; between the tolerances decimal rounding is absorbed.
    *scale = dev <= kMassTolerance ? 1.0 : 1.0 / total;
}

// Adapter so std:: distributions can consume our stream.
struct RngUrbg {
    Rng* rng;
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }
    result_type operator()() { return rng->next_u64(); }
};

constexpr std::uint64_t kLoopThreshold = 256;

/// Occupation counts of `count` iid categorical draws with the given
/// probabilities, via sequential conditional binomials.
void multinomial_counts(const std::vector<double>& probs, std::uint64_t count, Rng& rng,
                        std::vector<std::uint64_t>& out) {
    out.assign(probs.size(), 0);
    RngUrbg urbg{&rng};
    std::uint64_t remaining = count;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        if (mass_left <= 1e-15) break;
        double cond = std::clamp(probs[i] / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(remaining, cond);
        std::uint64_t b = bin(urbg);
        out[i] = b;
        remaining -= b;
        mass_left -= probs[i];
    }
    if (!probs.empty()) out.back() += remaining;
}

}  // namespace

DiscreteLaw::DiscreteLaw(std::vector<std::pair<std::uint64_t, double>> atoms) {
    std::map<std::uint64_t, double> acc;
    double total = 0.0;
    for (auto& [v, p] : atoms) {
        if (p < 0.0) throw std::invalid_argument("DiscreteLaw: negative probability");
        if (p == 0.0) continue;
        acc[v] += p;
        total += p;
    }
    if (acc.empty()) throw std::invalid_argument("DiscreteLaw: empty support");
    double scale = 1.0;
    check_and_renormalize(total, &scale, "DiscreteLaw");
    atoms_.assign(acc.begin(), acc.end());
    for (auto& [v, p] : atoms_) p *= scale;
    build_cdf();
}

void DiscreteLaw::build_cdf() {
    cdf_.resize(atoms_.size());
    double run = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        run += atoms_[i].second;
        cdf_[i] = run;
    }
    cdf_.back() = 1.0;
}

std::uint64_t DiscreteLaw::max_value() const {
    return atoms_.empty() ? 0 : atoms_.back().first;
}

double DiscreteLaw::mass_at(std::uint64_t v) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v,
                               [](const auto& a, std::uint64_t key) { return a.first < key; });
    return (it != atoms_.end() && it->first == v) ? it->second : 0.0;
}

double DiscreteLaw::mean() const {
    double m = 0.0;
    for (const auto& [v, p] : atoms_) m += static_cast<double>(v) * p;
    return m;
}

double DiscreteLaw::second_moment() const {
    double m = 0.0;
    for (const auto& [v, p] : atoms_) m += static_cast<double>(v) * static_cast<double>(v) * p;
    return m;
}

double DiscreteLaw::mean_log() const {
    double m = 0.0;
    for (const auto& [v, p] : atoms_)
        if (v > 0) m += p * static_cast<double>(v) * std::log(static_cast<double>(v));
    return m;
}

DiscreteLaw DiscreteLaw::convolve(const DiscreteLaw& other, std::size_t atom_cap) const {
    std::map<std::uint64_t, double> acc;
    for (const auto& [a, pa] : atoms_)
        for (const auto& [b, pb] : other.atoms_) acc[a + b] += pa * pb;
    if (atom_cap && acc.size() > atom_cap)
        throw ExpansionTooLarge("convolution support exceeds cap");
    DiscreteLaw out;
    out.atoms_.assign(acc.begin(), acc.end());
    out.build_cdf();
    return out;
}

DiscreteLaw DiscreteLaw::power_convolve(std::uint64_t n, std::size_t atom_cap) const {
    DiscreteLaw out = DiscreteLaw::point(0);
    for (std::uint64_t i = 0; i < n; ++i) out = out.convolve(*this, atom_cap);
    return out;
}

DiscreteLaw DiscreteLaw::size_biased() const {
    double m = mean();
    if (m <= 0.0) throw std::invalid_argument("size_biased: law has zero mean");
    std::vector<std::pair<std::uint64_t, double>> out;
    for (const auto& [v, p] : atoms_)
        if (v > 0) out.emplace_back(v, static_cast<double>(v) * p / m);
    return DiscreteLaw(std::move(out));
}

std::uint64_t DiscreteLaw::sample(Rng& rng) const {
    double u = rng.next_unit();
    std::size_t i = std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
    if (i >= atoms_.size()) i = atoms_.size() - 1;
    return atoms_[i].first;
}

std::uint64_t DiscreteLaw::sample_iid_sum(std::uint64_t count, Rng& rng) const {
    if (atoms_.size() == 1) return atoms_[0].first * count;
    if (count < kLoopThreshold) {
        std::uint64_t s = 0;
        for (std::uint64_t i = 0; i < count; ++i) s += sample(rng);
        return s;
    }
    std::vector<double> probs;
    probs.reserve(atoms_.size());
    for (const auto& [v, p] : atoms_) probs.push_back(p);
    std::vector<std::uint64_t> counts;
    multinomial_counts(probs, count, rng, counts);
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) s += atoms_[i].first * counts[i];
    return s;
}

VectorLaw::VectorLaw(std::size_t dim,
                     std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms)
    : dim_(dim) {
    std::map<std::vector<std::uint64_t>, double> acc;
    double total = 0.0;
    for (auto& [x, p] : atoms) {
        if (x.size() != dim_) throw std::invalid_argument("VectorLaw: vector of wrong length");
        if (p < 0.0) throw std::invalid_argument("VectorLaw: negative probability");
        if (p == 0.0) continue;
        acc[x] += p;
        total += p;
    }
    if (acc.empty()) throw std::invalid_argument("VectorLaw: empty support");
    double scale = 1.0;
    check_and_renormalize(total, &scale, "VectorLaw");
    atoms_.assign(acc.begin(), acc.end());
    for (auto& [x, p] : atoms_) p *= scale;
    build_cdf();
}

void VectorLaw::build_cdf() {
    cdf_.resize(atoms_.size());
    double run = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        run += atoms_[i].second;
        cdf_[i] = run;
    }
    cdf_.back() = 1.0;
}

DiscreteLaw VectorLaw::marginal(std::size_t j) const {
    std::map<std::uint64_t, double> acc;
    for (const auto& [x, p] : atoms_) acc[x[j]] += p;
    std::vector<std::pair<std::uint64_t, double>> v(acc.begin(), acc.end());
    return DiscreteLaw(std::move(v));
}

DiscreteLaw VectorLaw::sum_law() const {
    std::map<std::uint64_t, double> acc;
    for (const auto& [x, p] : atoms_) {
        std::uint64_t s = 0;
        for (auto c : x) s += c;
        acc[s] += p;
    }
    std::vector<std::pair<std::uint64_t, double>> v(acc.begin(), acc.end());
    return DiscreteLaw(std::move(v));
}

double VectorLaw::component_mean(std::size_t j) const {
    double m = 0.0;
    for (const auto& [x, p] : atoms_) m += static_cast<double>(x[j]) * p;
    return m;
}

double VectorLaw::total_mean() const {
    double m = 0.0;
    for (const auto& [x, p] : atoms_) {
        std::uint64_t s = 0;
        for (auto c : x) s += c;
        m += static_cast<double>(s) * p;
    }
    return m;
}

VectorLaw VectorLaw::convolve(const VectorLaw& other, std::size_t atom_cap) const {
    if (dim_ != other.dim_) throw std::invalid_argument("VectorLaw: dimension mismatch");
    std::map<std::vector<std::uint64_t>, double> acc;
    for (const auto& [a, pa] : atoms_)
        for (const auto& [b, pb] : other.atoms_) {
            std::vector<std::uint64_t> s(dim_);
            for (std::size_t j = 0; j < dim_; ++j) s[j] = a[j] + b[j];
            acc[std::move(s)] += pa * pb;
            if (atom_cap && acc.size() > atom_cap)
                throw ExpansionTooLarge("vector convolution support exceeds cap");
        }
    VectorLaw out;
    out.dim_ = dim_;
    out.atoms_.assign(acc.begin(), acc.end());
    out.build_cdf();
    return out;
}

VectorLaw VectorLaw::power_convolve(std::uint64_t n, std::size_t atom_cap) const {
    VectorLaw out(dim_, {{std::vector<std::uint64_t>(dim_, 0), 1.0}});
    for (std::uint64_t i = 0; i < n; ++i) out = out.convolve(*this, atom_cap);
    return out;
}

VectorLaw VectorLaw::sum_size_biased() const {
    double m = total_mean();
    if (m <= 0.0) throw std::invalid_argument("sum_size_biased: zero total mean");
    std::vector<std::pair<std::vector<std::uint64_t>, double>> out;
    for (const auto& [x, p] : atoms_) {
        std::uint64_t s = 0;
        for (auto c : x) s += c;
        if (s > 0) out.emplace_back(x, static_cast<double>(s) * p / m);
    }
    return VectorLaw(dim_, std::move(out));
}

double VectorLaw::mass_of(const std::vector<std::uint64_t>& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const auto& a, const std::vector<std::uint64_t>& key) {
                                   return a.first < key;
                               });
    return (it != atoms_.end() && it->first == x) ? it->second : 0.0;
}

const std::vector<std::uint64_t>& VectorLaw::sample(Rng& rng) const {
    double u = rng.next_unit();
    std::size_t i = std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
    if (i >= atoms_.size()) i = atoms_.size() - 1;
    return atoms_[i].first;
}

void VectorLaw::sample_iid_sum_into(std::uint64_t count, Rng& rng,
                                    std::vector<std::uint64_t>& acc) const {
    if (atoms_.size() == 1) {
        for (std::size_t j = 0; j < dim_; ++j) acc[j] += atoms_[0].first[j] * count;
        return;
    }
    if (count < kLoopThreshold) {
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto& x = sample(rng);
            for (std::size_t j = 0; j < dim_; ++j) acc[j] += x[j];
        }
        return;
    }
    std::vector<double> probs;
    probs.reserve(atoms_.size());
    for (const auto& [x, p] : atoms_) probs.push_back(p);
    std::vector<std::uint64_t> counts;
    multinomial_counts(probs, count, rng, counts);
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (std::size_t j = 0; j < dim_; ++j) acc[j] += atoms_[i].first[j] * counts[i];
}

}  // namespace bwb
