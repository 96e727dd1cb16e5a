#include "bwb/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace bwb {

double AbpreEnv::e_log_mean() const {
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.mean <= 0.0) return -HUGE_VAL;
        s += a.weight * std::log(a.mean);
    }
    return s;
}

double AbpreEnv::e_mean_log_mean() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight * xlogx(a.mean);
    return s;
}

double AbpreEnv::phi(double theta) const {
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.mean > 0.0)
            s += a.weight * std::pow(a.mean, theta);
        else if (theta == 0.0)
            s += a.weight;  // 0^0 = 1
    }
    return s;
}

bool AbpreEnv::has_certain_extinction_atom() const {
    for (const auto& a : atoms)
        if (a.weight > 0.0 && a.q >= 1.0) return true;
    return false;
}

bool AbpreEnv::all_means_zero() const {
    for (const auto& a : atoms)
        if (a.mean > 0.0) return false;
    return true;
}

AbpreEnv abpre_env(const ModelSpec& spec) {
    spec.validate();
    AbpreEnv env;
    env.nu = spec.cell_law.nu();
    if (env.nu <= 0.0) throw std::invalid_argument("abpre_env: nu must be positive");
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        const auto& kern = spec.kernel(k);
        for (std::uint64_t j = 0; j < k; ++j) {
            AbpreAtom a;
            a.j = j + 1;
            a.k = k;
            a.weight = p / env.nu;
            a.mean = kern.component_mean(j);
            a.q = kern.component_marginal(j).p_zero();
            env.atoms.push_back(a);
            env.gamma += p * a.mean;
        }
    }
    // Consistency with E m = gamma / nu.
    double em = 0.0;
    for (const auto& a : env.atoms) em += a.weight * a.mean;
    if (std::abs(em - env.gamma / env.nu) > 1e-10)
        throw std::logic_error("abpre_env: atom weights inconsistent with gamma/nu");
    return env;
}

namespace {

/// Golden-section minimizer of the convex restriction of phi to means > 0.
/// Returns (theta, value).
std::pair<double, double> minimize_positive_part(const AbpreEnv& env) {
    auto psi = [&env](double t) {
        double s = 0.0;
        for (const auto& a : env.atoms)
            if (a.mean > 0.0) s += a.weight * std::pow(a.mean, t);
        return s;
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = psi(x1), f2 = psi(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = psi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = psi(x2);
        }
    }
    double mid = 0.5 * (lo + hi);
    return {mid, psi(mid)};
}

}  // namespace

RhoResult compute_rho(const AbpreEnv& env) {
    if (env.all_means_zero())
        throw std::invalid_argument("rho: degenerate environment (all atom means zero)");

    RhoResult r;
    auto [theta_gs, val_gs] = minimize_positive_part(env);
    // Compare against the endpoints; ties resolve to the smallest theta.
    struct Cand {
        double theta, value;
    };
    Cand cands[3] = {{0.0, env.phi(0.0)}, {theta_gs, val_gs}, {1.0, env.phi(1.0)}};
    Cand best = cands[0];
    for (const auto& c : cands)
        if (c.value < best.value - 1e-15) best = c;
        else if (std::abs(c.value - best.value) <= 1e-15 && c.theta < best.theta) best = c;
    r.numeric = best.value;
    r.theta_star = best.theta;

    double e_log = env.e_log_mean();
    double e_mlogm = env.e_mean_log_mean();
    double boundary = std::min(1.0, env.gamma / env.nu);
    r.boundary_value = boundary;
    if (e_log >= 0.0) {
        r.branch = 1;
        r.closed_form = 1.0;
    } else if (e_mlogm <= 0.0) {
        r.branch = 2;
        r.closed_form = env.gamma / env.nu;
    } else {
        r.branch = 3;  // interior minimum; numeric value is authoritative
    }
    if (r.closed_form && std::abs(*r.closed_form - r.numeric) > 1e-9)
        throw std::logic_error("rho: closed form disagrees with numeric minimum");
    return r;
}

LClassification classify_L(const MomentTable& m, const AbpreEnv& env) {
    LClassification c;
    if (m.nu <= 1.0) {
        c.degenerate = true;
        c.reason = LReason::NuLeOne;
        c.note = "nu <= 1: the cell tree itself is critical or subcritical";
        return c;
    }
    if (!std::isfinite(m.n_log_n)) {
        c.degenerate = true;
        c.reason = LReason::NLogNInfinite;
        c.note = "E N log N infinite";
        return c;
    }
    double e_log = env.e_log_mean();
    if (e_log <= 0.0 || env.has_certain_extinction_atom()) {
        c.degenerate = true;
        c.reason = LReason::AbpreCondition;
        c.note = e_log <= 0.0 ? "E log g' <= 0: the parasite line dies along a random cell line"
                              : "an environment atom never produces offspring";
        return c;
    }
    c.degenerate = false;
    c.note = "nondegenerate on survival: {L = 0} coincides with extinction";
    return c;
}

WClassification classify_W(const MomentTable& m, const AbpreEnv& env) {
    WClassification c;
    double drift = 0.0;
    for (const auto& a : env.atoms) drift += a.weight * xlogx(a.mean / env.gamma);
    c.drift = drift;
    if (!std::isfinite(m.z1_log_z1)) {
        c.mean_one = false;
        c.reason = WReason::ZLogZInfinite;
        c.note = "E Z1 log Z1 infinite";
        return c;
    }
    if (drift < 0.0) {
        c.mean_one = true;
        c.reason = WReason::None;
        c.note = "E W = 1 and {W > 0} coincides with survival";
    } else {
        c.mean_one = false;
        c.reason = WReason::DriftNonNegative;
        c.note = "E (m/gamma) log(m/gamma) >= 0: parasite mass concentrates on heavy lines";
    }
    return c;
}

double growth_rate_contaminated(const AbpreEnv& env, const RhoResult& rho) {
    if (env.nu <= 1.0)
        throw std::invalid_argument("growth_rate: requires nu > 1");
    return std::log(env.nu * rho.numeric);
}

AbpreiReport abprei_criticality(const ModelSpec& spec, const AbpreEnv& env) {
    if (env.gamma <= 0.0) throw std::invalid_argument("abprei_criticality: gamma must be positive");
    AbpreiReport rep;

    // Route one: spinal-environment weights p_k mu / gamma, atoms with zero
    // mean carry zero weight and drop out.
    double direct = 0.0;
    double xlogx_term = 0.0;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        const auto& kern = spec.kernel(k);
        for (std::uint64_t j = 0; j < k; ++j) {
            double mu = kern.component_mean(j);
            if (mu <= 0.0) continue;
            direct += (p * mu / env.gamma) * std::log(mu);
            // (p_k mu / gamma) E[X log+ X] / mu collapses to p_k/gamma E[X log+ X].
            DiscreteLaw marg = kern.component_marginal(j);
            double xlx = 0.0;
            for (const auto& [v, q] : marg.atoms())
                if (v > 1) xlx += q * static_cast<double>(v) * std::log(static_cast<double>(v));
            xlogx_term += p / env.gamma * xlx;
        }
    }
    rep.e_log_mean_direct = direct;
    rep.e_xlogx_over_mean = xlogx_term;

    // Route two: through the cell-line environment.
    rep.e_log_mean_via_env = (env.nu / env.gamma) * env.e_mean_log_mean();

    if (std::abs(rep.e_log_mean_direct - rep.e_log_mean_via_env) > 1e-10)
        throw std::logic_error("abprei_criticality: the two evaluations disagree");

    const double tol = 1e-12;
    double v = rep.e_log_mean_direct;
    rep.criticality = v > tol    ? Criticality::Supercritical
                      : v < -tol ? Criticality::Subcritical
                                 : Criticality::Critical;

    double e_log = env.e_log_mean();
    double e_mlogm = env.e_mean_log_mean();
    if (e_log >= -tol) {
        rep.abpre_subregime = AbpreSubregime::NonSub;
    } else if (e_mlogm < -tol) {
        rep.abpre_subregime = AbpreSubregime::StronglySub;
    } else if (e_mlogm > tol) {
        rep.abpre_subregime = AbpreSubregime::WeaklySub;
    } else {
        rep.abpre_subregime = AbpreSubregime::IntermediateSub;
    }

    switch (rep.criticality) {
        case Criticality::Subcritical:
            rep.correspondence_branch = AbpreSubregime::StronglySub;
            break;
        case Criticality::Critical:
            rep.correspondence_branch = AbpreSubregime::IntermediateSub;
            break;
        case Criticality::Supercritical:
            // weakly subcritical or not subcritical at all
            rep.correspondence_branch = AbpreSubregime::WeaklySub;
            break;
    }

    for (const auto& a : env.atoms)
        if (a.weight > 0.0 && std::abs(a.mean - 1.0) > tol) rep.hypothesis_holds = true;

    if (rep.hypothesis_holds) {
        bool ok = false;
        switch (rep.criticality) {
            case Criticality::Subcritical:
                ok = rep.abpre_subregime == AbpreSubregime::StronglySub;
                break;
            case Criticality::Critical:
                ok = rep.abpre_subregime == AbpreSubregime::IntermediateSub;
                break;
            case Criticality::Supercritical:
                ok = rep.abpre_subregime == AbpreSubregime::WeaklySub ||
                     rep.abpre_subregime == AbpreSubregime::NonSub;
                break;
        }
        rep.consistent = ok;
    } else {
        // Degenerate environment (every mean equals one): the correspondence
        // is vacuous; report the branch implied by the sign only.
        rep.consistent = true;
    }
    return rep;
}

NormingSequence heyde_seneta_norming(const CellOffspringLaw& cell_law, double a, std::uint64_t n) {
    if (!(a > 0.0)) throw std::invalid_argument("a too small: a must be positive");
    if (cell_law.truncated_mean(a) <= 1.0)
        throw std::invalid_argument("a too small: E[N 1{N <= a}] <= 1");
    NormingSequence seq;
    seq.a = a;
    seq.values.push_back(a);
    for (std::uint64_t m = 1; m <= n; ++m) {
        double prev = seq.values.back();
        double factor = cell_law.truncated_mean(prev);
        seq.values.push_back(prev * factor);
        seq.ratios.push_back(factor);
    }
    return seq;
}

RegimeReport analyze(const ModelSpec& spec) {
    RegimeReport rep;
    rep.model_name = spec.name;
    rep.moments = compute_moments(spec);
    rep.env = abpre_env(spec);
    rep.e_log_gprime = rep.env.e_log_mean();
    rep.e_gprime_log_gprime = rep.env.e_mean_log_mean();
    rep.rho = compute_rho(rep.env);
    if (rep.env.nu > 1.0) rep.growth_rate = growth_rate_contaminated(rep.env, rep.rho);
    rep.l_class = classify_L(rep.moments, rep.env);
    rep.w_class = classify_W(rep.moments, rep.env);
    rep.abprei = abprei_criticality(spec, rep.env);
    return rep;
}

const char* to_string(LReason r) {
    switch (r) {
        case LReason::None: return "none";
        case LReason::NuLeOne: return "nu_le_1";
        case LReason::NLogNInfinite: return "ENlogN_infinite";
        case LReason::AbpreCondition: return "abpre_condition";
    }
    return "?";
}

const char* to_string(WReason r) {
    switch (r) {
        case WReason::None: return "none";
        case WReason::ZLogZInfinite: return "zlogz_infinite";
        case WReason::DriftNonNegative: return "drift_nonneg";
    }
    return "?";
}

const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Critical: return "critical";
        case Criticality::Supercritical: return "supercritical";
    }
    return "?";
}

const char* to_string(AbpreSubregime s) {
    switch (s) {
        case AbpreSubregime::StronglySub: return "strongly_subcritical";
        case AbpreSubregime::IntermediateSub: return "intermediate_subcritical";
        case AbpreSubregime::WeaklySub: return "weakly_subcritical";
        case AbpreSubregime::NonSub: return "non_subcritical";
    }
    return "?";
}

}  // namespace bwb
