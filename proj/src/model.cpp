#include "bwb/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bwb {

CellOffspringLaw::CellOffspringLaw(std::vector<std::pair<std::uint64_t, double>> entries)
    : law_(std::move(entries)) {
    if (law_.max_value() >= (1ull << 16))
        throw std::invalid_argument("cell law: support bound must be below 2^16");
}

double CellOffspringLaw::truncated_mean(double c) const {
    double m = 0.0;
    for (const auto& [k, p] : law_.atoms())
        if (static_cast<double>(k) <= c) m += static_cast<double>(k) * p;
    return m;
}

SharingKernel SharingKernel::table(std::uint64_t k, VectorLaw law) {
    if (law.dim() != k) throw std::invalid_argument("kernel table: vector length must equal k");
    SharingKernel out;
    out.k_ = k;
    out.repr_ = std::move(law);
    return out;
}

SharingKernel SharingKernel::product(std::uint64_t k, std::vector<DiscreteLaw> components) {
    if (components.size() != k)
        throw std::invalid_argument("kernel product: need exactly k component laws");
    SharingKernel out;
    out.k_ = k;
    out.repr_ = std::move(components);
    return out;
}

double SharingKernel::component_mean(std::size_t j) const {
    if (j >= k_) throw std::out_of_range("kernel component index");
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) return t->component_mean(j);
    return std::get<std::vector<DiscreteLaw>>(repr_)[j].mean();
}

DiscreteLaw SharingKernel::component_marginal(std::size_t j) const {
    if (j >= k_) throw std::out_of_range("kernel component index");
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) return t->marginal(j);
    return std::get<std::vector<DiscreteLaw>>(repr_)[j];
}

DiscreteLaw SharingKernel::sum_law() const {
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) return t->sum_law();
    const auto& comps = std::get<std::vector<DiscreteLaw>>(repr_);
    DiscreteLaw s = DiscreteLaw::point(0);
    for (const auto& c : comps) s = s.convolve(c);
    return s;
}

double SharingKernel::total_mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < k_; ++j) m += component_mean(j);
    return m;
}

VectorLaw SharingKernel::as_table(std::size_t cap) const {
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) return *t;
    const auto& comps = std::get<std::vector<DiscreteLaw>>(repr_);
    // Cartesian expansion of the independent components.
    std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms{{{}, 1.0}};
    for (const auto& c : comps) {
        std::vector<std::pair<std::vector<std::uint64_t>, double>> next;
        if (atoms.size() * c.atoms().size() > cap)
            throw ExpansionTooLarge("kernel too large for exact moments");
        next.reserve(atoms.size() * c.atoms().size());
        for (const auto& [prefix, p] : atoms)
            for (const auto& [v, q] : c.atoms()) {
                auto x = prefix;
                x.push_back(v);
                next.emplace_back(std::move(x), p * q);
            }
        atoms = std::move(next);
    }
    return VectorLaw(k_, std::move(atoms));
}

void SharingKernel::sample_into(Rng& rng, std::vector<std::uint64_t>& out) const {
    out.resize(k_);
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) {
        const auto& x = t->sample(rng);
        std::copy(x.begin(), x.end(), out.begin());
        return;
    }
    const auto& comps = std::get<std::vector<DiscreteLaw>>(repr_);
    for (std::size_t j = 0; j < k_; ++j) out[j] = comps[j].sample(rng);
}

void SharingKernel::sample_sum_into(Rng& rng, std::uint64_t z,
                                    std::vector<std::uint64_t>& daughters) const {
    if (const auto* t = std::get_if<VectorLaw>(&repr_)) {
        t->sample_iid_sum_into(z, rng, daughters);
        return;
    }
    const auto& comps = std::get<std::vector<DiscreteLaw>>(repr_);
    for (std::size_t j = 0; j < k_; ++j) daughters[j] += comps[j].sample_iid_sum(z, rng);
}

void ModelSpec::validate() const {
    if (cell_law.law().empty()) throw std::invalid_argument("model: empty cell law");
    std::set<std::uint64_t> support;
    for (const auto& [k, p] : cell_law.law().atoms())
        if (k >= 1) support.insert(k);
    for (auto k : support)
        if (!kernels.count(k))
            throw std::invalid_argument("model: missing kernel for k=" + std::to_string(k));
    for (const auto& [k, kern] : kernels) {
        if (!support.count(k))
            throw std::invalid_argument("model: kernel for k=" + std::to_string(k) +
                                        " outside the cell-law support");
        if (kern.k() != k) throw std::invalid_argument("model: kernel dimension mismatch");
    }
}

const SharingKernel& ModelSpec::kernel(std::uint64_t k) const {
    auto it = kernels.find(k);
    if (it == kernels.end())
        throw std::out_of_range("model: no kernel for k=" + std::to_string(k));
    return it->second;
}

MomentTable compute_moments(const ModelSpec& spec) {
    spec.validate();
    MomentTable t;
    t.nu = spec.cell_law.nu();
    t.n_log_n = spec.cell_law.n_log_n();
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        const auto& kern = spec.kernel(k);
        double row = 0.0;
        for (std::uint64_t j = 0; j < k; ++j) {
            double m = kern.component_mean(j);
            t.mu[{j + 1, k}] = m;
            row += m;
        }
        t.gamma += p * row;
        // E S log S over the exact law of the parasite's total offspring.
        DiscreteLaw s = kern.sum_law();
        double slogs = 0.0;
        for (const auto& [v, q] : s.atoms())
            if (v > 0) slogs += q * static_cast<double>(v) * std::log(static_cast<double>(v));
        t.z1_log_z1 += p * slogs;
    }
    return t;
}

bool two_parasite_spread_possible(const ModelSpec& spec) {
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k < 2 || p <= 0.0) continue;
        const auto& kern = spec.kernel(k);
        std::size_t reachable = 0;
        for (std::uint64_t j = 0; j < k; ++j) {
            DiscreteLaw m = kern.component_marginal(j);
            if (1.0 - m.p_zero() > 0.0) ++reachable;
            if (reachable >= 2) return true;
        }
    }
    return false;
}

namespace {

/// Minimal forward run used only by the A5 probe; counts a replicate as
/// surviving when parasites are still present at the horizon (a blow-up past
/// the probe caps counts as survival).
bool probe_survives(const ModelSpec& spec, std::uint64_t horizon, Rng& rng) {
    constexpr std::uint64_t kProbeParasiteCap = 100'000;
    std::map<std::uint64_t, std::uint64_t> cells{{1, 1}};
    std::vector<std::uint64_t> daughters;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        if (cells.empty()) return false;
        std::map<std::uint64_t, std::uint64_t> next;
        std::uint64_t total = 0;
        for (const auto& [z, count] : cells) {
            for (std::uint64_t c = 0; c < count; ++c) {
                std::uint64_t k = spec.cell_law.law().sample(rng);
                if (k == 0) continue;
                const auto& kern = spec.kernel(k);
                daughters.assign(k, 0);
                kern.sample_sum_into(rng, z, daughters);
                for (std::uint64_t j = 0; j < k; ++j)
                    if (daughters[j] > 0) {
                        next[daughters[j]] += 1;
                        total += daughters[j];
                    }
            }
            if (total > kProbeParasiteCap) return true;
        }
        cells = std::move(next);
    }
    return !cells.empty();
}

}  // namespace

bool AssumptionReport::a1_to_a4_pass() const {
    for (const auto& r : results)
        if (r.id != "A5" && r.verdict != Verdict::Pass) return false;
    return true;
}

const AssumptionResult& AssumptionReport::at(const std::string& id) const {
    for (const auto& r : results)
        if (r.id == id) return r;
    throw std::out_of_range("no assumption " + id);
}

AssumptionReport validate_assumptions(const ModelSpec& spec, const AssumptionProbeConfig& probe) {
    spec.validate();
    MomentTable m = compute_moments(spec);
    AssumptionReport rep;

    // A1: 0 < gamma < infinity (finiteness is structural here).
    rep.results.push_back({"A1",
                           (m.gamma > 0.0) ? Verdict::Pass : Verdict::Fail,
                           "gamma = " + std::to_string(m.gamma)});

    // A2: p_1 < 1 and P(Z_1 = 1) < 1.
    double p1 = spec.cell_law.p(1);
    double pz1 = 0.0;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        pz1 += p * spec.kernel(k).sum_law().mass_at(1);
    }
    bool a2 = p1 < 1.0 && pz1 < 1.0;
    rep.results.push_back({"A2", a2 ? Verdict::Pass : Verdict::Fail,
                           "p_1 = " + std::to_string(p1) + ", P(Z1=1) = " + std::to_string(pz1)});

    // A3: some component with p_k > 0 is not identically 1.
    bool a3 = false;
    std::string a3_witness = "none";
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0 || a3) continue;
        for (std::uint64_t j = 0; j < k && !a3; ++j) {
            DiscreteLaw marg = spec.kernel(k).component_marginal(j);
            if (marg.mass_at(1) < 1.0) {
                a3 = true;
                a3_witness = "(j,k) = (" + std::to_string(j + 1) + "," + std::to_string(k) + ")";
            }
        }
    }
    rep.results.push_back({"A3", a3 ? Verdict::Pass : Verdict::Fail, a3_witness});

    // A4: two parasites in one cell can contaminate two distinct daughters.
    bool a4 = two_parasite_spread_possible(spec);
    rep.results.push_back({"A4", a4 ? Verdict::Pass : Verdict::Fail,
                           a4 ? "two distinct daughters reachable" : "all offspring share one daughter"});

    // A5: survival with positive probability. gamma <= 1 forces extinction;
    // otherwise report a Monte-Carlo estimate, labelled heuristic, since no
    // exact criterion is computed here.
    if (m.gamma <= 1.0) {
        rep.results.push_back({"A5", Verdict::Fail,
                               "gamma = " + std::to_string(m.gamma) + " <= 1: extinction is certain"});
    } else {
        std::uint64_t survived = 0;
        for (std::uint64_t r = 0; r < probe.mc_budget; ++r) {
            Rng rng = derive_stream(probe.seed, stream_tag::assumption_probe, r);
            if (probe_survives(spec, probe.horizon, rng)) ++survived;
        }
        double freq = probe.mc_budget
                          ? static_cast<double>(survived) / static_cast<double>(probe.mc_budget)
                          : 0.0;
        rep.results.push_back({"A5",
                               survived > 0 ? Verdict::McSupported : Verdict::Fail,
                               "heuristic: survival frequency " + std::to_string(freq) + " at horizon " +
                                   std::to_string(probe.horizon) + " (" +
                                   std::to_string(probe.mc_budget) + " reps)"});
    }
    return rep;
}

namespace fixtures {

ModelSpec bin2() {
    ModelSpec s;
    s.name = "m_bin2";
    s.cell_law = CellOffspringLaw({{2, 1.0}});
    s.kernels[2] = SharingKernel::table(
        2, VectorLaw(2, {{{2, 0}, 0.25}, {{1, 1}, 0.5}, {{0, 2}, 0.25}}));
    return s;
}

ModelSpec asym() {
    ModelSpec s;
    s.name = "m_asym";
    s.cell_law = CellOffspringLaw({{2, 1.0}});
    s.kernels[2] = SharingKernel::table(2, VectorLaw(2, {{{2, 0}, 0.5}, {{0, 1}, 0.5}}));
    return s;
}

ModelSpec weak() {
    ModelSpec s;
    s.name = "m_weak";
    s.cell_law = CellOffspringLaw({{5, 1.0}});
    std::vector<DiscreteLaw> comps;
    comps.push_back(DiscreteLaw::point(4));
    for (int j = 0; j < 4; ++j) comps.push_back(DiscreteLaw({{0, 0.9}, {1, 0.1}}));
    s.kernels[5] = SharingKernel::product(5, std::move(comps));
    return s;
}

ModelSpec sub() {
    ModelSpec s;
    s.name = "m_sub";
    s.cell_law = CellOffspringLaw({{0, 0.5}, {1, 0.5}});
    s.kernels[1] = SharingKernel::table(1, VectorLaw(1, {{{2}, 1.0}}));
    return s;
}

ModelSpec boost() {
    ModelSpec s;
    s.name = "m_boost";
    s.cell_law = CellOffspringLaw({{1, 0.25}, {2, 0.75}});
    s.kernels[1] = SharingKernel::table(1, VectorLaw(1, {{{12}, 1.0}}));
    s.kernels[2] = SharingKernel::table(
        2, VectorLaw(2, {{{1, 0}, 0.35}, {{0, 1}, 0.35}, {{0, 0}, 0.3}}));
    return s;
}

}  // namespace fixtures

}  // namespace bwb
