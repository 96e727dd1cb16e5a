#include "bwb/spine.hpp"

#include <cmath>
#include <stdexcept>

namespace bwb {

DiscreteLaw spinal_daughter_count_law(const ModelSpec& spec) {
    spec.validate();
    MomentTable m = compute_moments(spec);
    if (m.gamma <= 0.0) throw std::invalid_argument("spinal law: gamma must be positive");
    std::vector<std::pair<std::uint64_t, double>> atoms;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        double row = spec.kernel(k).total_mean();
        if (row > 0.0) atoms.emplace_back(k, p * row / m.gamma);
    }
    if (atoms.empty()) throw std::invalid_argument("spinal law: no reproducing kernels");
    return DiscreteLaw(std::move(atoms));
}

VectorLaw spinal_offspring_law(const ModelSpec& spec, std::uint64_t k, std::size_t table_cap) {
    return spec.kernel(k).as_table(table_cap).sum_size_biased();
}

namespace {

/// Cached tables for repeated spinal sampling on one model.
struct SpinePrep {
    MomentTable moments;
    DiscreteLaw that_law;
    std::map<std::uint64_t, VectorLaw> xhat;

    SpinePrep(const ModelSpec& spec, std::size_t table_cap)
        : moments(compute_moments(spec)), that_law(spinal_daughter_count_law(spec)) {
        for (const auto& [k, p] : that_law.atoms())
            xhat.emplace(k, spinal_offspring_law(spec, k, table_cap));
    }
};

SpinalStep sample_step_prepared(std::uint64_t z, const ModelSpec& spec, const SpinePrep& prep,
                                Rng& rng) {
    if (z == 0) throw std::invalid_argument("spinal step: the spinal cell must hold a parasite");
    SpinalStep step;
    step.k = prep.that_law.sample(rng);
    const VectorLaw& xl = prep.xhat.at(step.k);
    const auto& x = xl.sample(rng);

    std::uint64_t total = 0;
    for (auto c : x) total += c;
    // Uniform pick among the spinal parasite's offspring, listed in
    // kernel-vector order: daughter 1's offspring first.
    std::uint64_t pick = rng.next_below(total) + 1;
    std::uint64_t acc = 0;
    std::uint64_t l = 0;
    for (std::uint64_t j = 0; j < step.k; ++j) {
        acc += x[j];
        if (pick <= acc) {
            l = j + 1;
            break;
        }
    }
    step.l = l;
    step.daughters.assign(step.k, 0);
    for (std::uint64_t j = 0; j < step.k; ++j) step.daughters[j] = x[j];
    spec.kernel(step.k).sample_sum_into(rng, z - 1, step.daughters);
    step.spinal_component = x[l - 1];
    step.immigrants = x[l - 1] - 1;
    return step;
}

}  // namespace

SpinalStep sample_spinal_step(std::uint64_t z, const ModelSpec& spec, Rng& rng,
                              std::size_t table_cap) {
    SpinePrep prep(spec, table_cap);
    return sample_step_prepared(z, spec, prep, rng);
}

DiscreteLaw SpinalStepLaw::marginal_daughter_count() const {
    std::map<std::uint64_t, double> acc;
    for (const auto& a : atoms) acc[a.k] += a.prob;
    std::vector<std::pair<std::uint64_t, double>> v(acc.begin(), acc.end());
    return DiscreteLaw(std::move(v));
}

double SpinalStepLaw::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.prob;
    return m;
}

SpinalStepLaw spinal_step_law(std::uint64_t z, const ModelSpec& spec, std::size_t table_cap) {
    if (z == 0) throw std::invalid_argument("spinal step law: z must be at least 1");
    spec.validate();
    MomentTable m = compute_moments(spec);
    if (m.gamma <= 0.0) throw std::invalid_argument("spinal step law: gamma must be positive");

    SpinalStepLaw law;
    law.z = z;
    for (const auto& [k, p] : spec.cell_law.law().atoms()) {
        if (k == 0) continue;
        VectorLaw conv = spec.kernel(k).as_table(table_cap).power_convolve(z, table_cap);
        for (const auto& [vec, q] : conv.atoms()) {
            for (std::uint64_t l = 1; l <= k; ++l) {
                if (vec[l - 1] == 0) continue;
                SpinalStepLaw::Atom a;
                a.k = k;
                a.l = l;
                a.daughters = vec;
                a.prob = p * static_cast<double>(vec[l - 1]) /
                         (static_cast<double>(z) * m.gamma) * q;
                law.atoms.push_back(std::move(a));
            }
        }
    }
    return law;
}

SpineRecord run_spine(const ModelSpec& spec, std::uint64_t horizon, Rng rng) {
    constexpr std::uint64_t kSpineParasiteLimit = 1'000'000'000'000'000ull;
    SpinePrep prep(spec, kDefaultTableCap);
    SpineRecord rec;
    std::uint64_t z = 1;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        SpinalStep step = sample_step_prepared(z, spec, prep, rng);
        rec.rows.push_back({n, z, step.k, step.l, step.immigrants});
        z = step.daughters[step.l - 1];
        if (z > kSpineParasiteLimit)
            throw std::runtime_error("spinal parasite count exceeds internal limit; reduce the horizon");
    }
    rec.rows.push_back({horizon, z, 0, 0, 0});
    return rec;
}

SizeBiasedTree run_sizebiased_tree(const ModelSpec& spec, std::uint64_t depth,
                                   std::uint64_t node_cap, Rng rng) {
    SpinePrep prep(spec, kDefaultTableCap);
    SizeBiasedTree tree;

    SizeBiasedGeneration root;
    root.cells[""] = 1;
    root.spine_label = "";
    root.parasites = 1;
    root.w_hat = 1.0;
    tree.generations.push_back(root);

    double gamma_pow = 1.0;
    std::vector<std::uint64_t> daughters;
    for (std::uint64_t d = 0; d < depth; ++d) {
        const auto& cur = tree.generations.back();
        SizeBiasedGeneration next;
        gamma_pow *= prep.moments.gamma;

        for (const auto& [label, z] : cur.cells) {
            bool is_spinal = (label == cur.spine_label);
            if (is_spinal) {
                SpinalStep step = sample_step_prepared(z, spec, prep, rng);
                for (std::uint64_t j = 1; j <= step.k; ++j) {
                    std::string child = label.empty() ? std::to_string(j)
                                                      : label + "." + std::to_string(j);
                    next.cells[child] = step.daughters[j - 1];
                    next.parasites += step.daughters[j - 1];
                    if (j == step.l) next.spine_label = child;
                }
            } else {
                std::uint64_t k = spec.cell_law.law().sample(rng);
                if (k == 0) continue;
                daughters.assign(k, 0);
                spec.kernel(k).sample_sum_into(rng, z, daughters);
                for (std::uint64_t j = 1; j <= k; ++j) {
                    std::string child = label.empty() ? std::to_string(j)
                                                      : label + "." + std::to_string(j);
                    next.cells[child] = daughters[j - 1];
                    next.parasites += daughters[j - 1];
                }
            }
            if (next.cells.size() > node_cap) {
                tree.truncated = true;
                return tree;
            }
        }
        next.w_hat = static_cast<double>(next.parasites) / gamma_pow;
        tree.generations.push_back(std::move(next));
    }
    return tree;
}

}  // namespace bwb
