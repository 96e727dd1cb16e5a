#include "bwb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bwb {

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double x : xs) {
        double d = x - r.mean;
        ss += d * d;
    }
    double var = ss / static_cast<double>(r.n - 1);
    r.se = std::sqrt(var / static_cast<double>(r.n));
    return r;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected_probs,
                               double min_expected) {
    if (observed.size() != expected_probs.size())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    std::uint64_t total = 0;
    for (auto c : observed) total += c;
    double n = static_cast<double>(total);

    // Pool buckets whose expected count is below the threshold.
    std::vector<double> exp_pooled;
    std::vector<double> obs_pooled;
    double small_exp = 0.0, small_obs = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probs[i] * n;
        if (e < min_expected) {
            small_exp += e;
            small_obs += static_cast<double>(observed[i]);
        } else {
            exp_pooled.push_back(e);
            obs_pooled.push_back(static_cast<double>(observed[i]));
        }
    }
    if (small_exp > 0.0 || small_obs > 0.0) {
        exp_pooled.push_back(small_exp);
        obs_pooled.push_back(small_obs);
    }

    ChiSquareResult r;
    if (exp_pooled.size() < 2) {
        r.dof = 0;
        r.p_value = 1.0;
        return r;
    }
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        if (exp_pooled[i] <= 0.0) {
            if (obs_pooled[i] > 0.0) {
                // Mass observed where none was expected: definite rejection.
                r.statistic = std::numeric_limits<double>::infinity();
                r.dof = exp_pooled.size() - 1;
                r.p_value = 0.0;
                return r;
            }
            continue;
        }
        double d = obs_pooled[i] - exp_pooled[i];
        r.statistic += d * d / exp_pooled[i];
    }
    r.dof = exp_pooled.size() - 1;
    r.p_value = gamma_q(static_cast<double>(r.dof) / 2.0, r.statistic / 2.0);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
    double na = 0.0, nb = 0.0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);

    // Pool sparse buckets jointly so both samples use the same partition.
    std::vector<std::pair<double, double>> cells;
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tot = static_cast<double>(a[i] + b[i]);
        double ea = tot * na / (na + nb);
        double eb = tot * nb / (na + nb);
        if (ea < min_expected || eb < min_expected) {
            pa += static_cast<double>(a[i]);
            pb += static_cast<double>(b[i]);
        } else {
            cells.emplace_back(static_cast<double>(a[i]), static_cast<double>(b[i]));
        }
    }
    if (pa > 0.0 || pb > 0.0) cells.emplace_back(pa, pb);

    ChiSquareResult r;
    if (cells.size() < 2) {
        r.dof = 0;
        r.p_value = 1.0;
        return r;
    }
    for (auto& [ca, cb] : cells) {
        double tot = ca + cb;
        if (tot <= 0.0) continue;
        double ea = tot * na / (na + nb);
        double eb = tot * nb / (na + nb);
        r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    r.dof = cells.size() - 1;
    r.p_value = gamma_q(static_cast<double>(r.dof) / 2.0, r.statistic / 2.0);
    return r;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols_slope: need matching samples of size >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate x");
    return sxy / sxx;
}

Interval mean_ci99(std::span<const double> xs) {
    MeanSe ms = mean_se(xs);
    return {ms.mean - kZ99 * ms.se, ms.mean + kZ99 * ms.se};
}

Interval proportion_ci99(std::uint64_t successes, std::uint64_t trials) {
    double n = static_cast<double>(trials);
    double p = trials ? static_cast<double>(successes) / n : 0.0;
    double se = trials ? std::sqrt(std::max(p * (1.0 - p), 0.0) / n) : 0.0;
    return {p - kZ99 * se, p + kZ99 * se};
}

}  // namespace bwb
