#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bwb/model.hpp"

namespace bwb {

/// One atom of the parasite-line environment: the law of component j of the
/// k-daughter kernel, picked with weight p_k / nu per ordered pair (j, k).
struct AbpreAtom {
    std::uint64_t j = 0;  // 1-based daughter index
    std::uint64_t k = 0;
    double weight = 0.0;
    double mean = 0.0;    // mu_{j,k}
    double q = 0.0;       // P(component = 0)
};

/// Environment of the branching process along a uniformly chosen cell line.
struct AbpreEnv {
    std::vector<AbpreAtom> atoms;
    double nu = 0.0;
    double gamma = 0.0;

    /// E log m over the atoms; -infinity when an atom has mean zero.
    double e_log_mean() const;
    /// E m log m with the 0 log 0 = 0 convention.
    double e_mean_log_mean() const;
    /// phi(theta) = sum w m^theta, with 0^0 = 1 and 0^theta = 0 for theta > 0.
    double phi(double theta) const;
    /// True when some positively weighted atom never produces offspring.
    bool has_certain_extinction_atom() const;
    bool all_means_zero() const;
};

AbpreEnv abpre_env(const ModelSpec& spec);

struct RhoResult {
    double numeric = 0.0;
    double theta_star = 0.0;
    std::optional<double> closed_form;  // populated in the first two branches only
    int branch = 0;                     // 1: E log m >= 0; 2: drift branch; 3: interior
    /// min(1, gamma/nu); reported for comparison when branch == 3.
    double boundary_value = 0.0;
};

/// Decay rate of the parasite line's survival probability,
/// rho = inf over theta in [0,1] of phi(theta). The numeric minimizer is
/// authoritative; the closed form is a cross-check on its first two branches.
RhoResult compute_rho(const AbpreEnv& env);

enum class LReason { None, NuLeOne, NLogNInfinite, AbpreCondition };

struct LClassification {
    bool degenerate = false;
    LReason reason = LReason::None;
    std::string note;
};

/// Dichotomy for the limit of the normalized contaminated-cell count.
LClassification classify_L(const MomentTable& m, const AbpreEnv& env);

enum class WReason { None, ZLogZInfinite, DriftNonNegative };

struct WClassification {
    bool mean_one = false;
    WReason reason = WReason::None;
    double drift = 0.0;  // E (m/gamma) log(m/gamma)
    std::string note;
};

/// Kesten-Stigum dichotomy for the parasite martingale limit W.
WClassification classify_W(const MomentTable& m, const AbpreEnv& env);

/// log(nu * rho); requires nu > 1.
double growth_rate_contaminated(const AbpreEnv& env, const RhoResult& rho);

enum class Criticality { Subcritical, Critical, Supercritical };
enum class AbpreSubregime { StronglySub, IntermediateSub, WeaklySub, NonSub };

struct AbpreiReport {
    /// E log of the spinal-environment mean, evaluated two ways.
    double e_log_mean_direct = 0.0;   // sum (p_k mu / gamma) log mu
    double e_log_mean_via_env = 0.0;  // (nu/gamma) E m log m
    /// E[(X log+ X) / mu] under the spinal environment; finite for every
    /// finite-support model but reported anyway.
    double e_xlogx_over_mean = 0.0;
    Criticality criticality = Criticality::Critical;
    AbpreSubregime abpre_subregime = AbpreSubregime::NonSub;
    /// Branch of the criticality correspondence implied by the sign.
    AbpreSubregime correspondence_branch = AbpreSubregime::NonSub;
    /// The correspondence is only claimed when some atom mean differs from 1.
    bool hypothesis_holds = false;
    bool consistent = true;
};

AbpreiReport abprei_criticality(const ModelSpec& spec, const AbpreEnv& env);

struct NormingSequence {
    double a = 0.0;
    std::vector<double> values;  // c_0 .. c_n
    std::vector<double> ratios;  // c_{m+1} / c_m
};

/// Truncated-mean recursion c_m = c_{m-1} E[N 1{N <= c_{m-1}}].
/// Throws std::invalid_argument("a too small") when E[N 1{N <= a}] <= 1.
NormingSequence heyde_seneta_norming(const CellOffspringLaw& cell_law, double a, std::uint64_t n);

/// Everything the analyze command reports for one model.
struct RegimeReport {
    std::string model_name;
    MomentTable moments;
    AbpreEnv env;
    double e_log_gprime = 0.0;  // -inf encoded as -HUGE_VAL
    double e_gprime_log_gprime = 0.0;
    RhoResult rho;
    std::optional<double> growth_rate;  // absent when nu <= 1
    LClassification l_class;
    WClassification w_class;
    AbpreiReport abprei;
};

RegimeReport analyze(const ModelSpec& spec);

const char* to_string(LReason r);
const char* to_string(WReason r);
const char* to_string(Criticality c);
const char* to_string(AbpreSubregime s);

}  // namespace bwb
