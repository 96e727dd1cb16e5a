#include <doctest.h>

#include <cmath>
#include <map>

#include "bwb/discrete.hpp"
#include "bwb/stats.hpp"

using namespace bwb;

TEST_CASE("law construction normalizes tiny drift and rejects real deviations") {
    DiscreteLaw ok({{0, 0.5}, {1, 0.5 + 4e-10}});
    double total = 0.0;
    for (const auto& [v, p] : ok.atoms()) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(DiscreteLaw({{0, 0.5}, {1, 0.5 + 5e-9}}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteLaw({{0, -0.1}, {1, 1.1}}), std::invalid_argument);
    std::vector<std::pair<std::uint64_t, double>> empty;
    CHECK_THROWS_AS(DiscreteLaw(std::move(empty)), std::invalid_argument);
}

TEST_CASE("duplicate values merge") {
    DiscreteLaw law({{2, 0.25}, {2, 0.25}, {5, 0.5}});
    CHECK(law.support_size() == 2);
    CHECK(law.mass_at(2) == doctest::Approx(0.5));
}

TEST_CASE("moments of a simple law") {
    DiscreteLaw law({{0, 0.25}, {1, 0.5}, {2, 0.25}});
    CHECK(law.mean() == doctest::Approx(1.0));
    CHECK(law.second_moment() == doctest::Approx(1.5));
    CHECK(law.mean_log() == doctest::Approx(0.25 * 2 * std::log(2.0)));
    CHECK(law.p_zero() == doctest::Approx(0.25));
}

TEST_CASE("convolution matches direct enumeration") {
    DiscreteLaw a({{0, 0.5}, {2, 0.5}});
    DiscreteLaw b({{1, 0.25}, {3, 0.75}});
    DiscreteLaw c = a.convolve(b);
    CHECK(c.mass_at(1) == doctest::Approx(0.125));
    CHECK(c.mass_at(3) == doctest::Approx(0.375 + 0.125));
    CHECK(c.mass_at(5) == doctest::Approx(0.375));
    CHECK(c.mean() == doctest::Approx(a.mean() + b.mean()));
}

TEST_CASE("size biasing reweights by value") {
    DiscreteLaw law({{0, 0.5}, {1, 0.25}, {3, 0.25}});
    DiscreteLaw sb = law.size_biased();
    CHECK(sb.mass_at(0) == 0.0);
    CHECK(sb.mass_at(1) == doctest::Approx(0.25 / 1.0));
    CHECK(sb.mass_at(3) == doctest::Approx(0.75 / 1.0));
}

TEST_CASE("sampling frequencies match the law") {
    DiscreteLaw law({{0, 0.2}, {1, 0.5}, {4, 0.3}});
    Rng rng(77);
    std::map<std::uint64_t, std::uint64_t> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[law.sample(rng)];
    std::vector<std::uint64_t> obs{counts[0], counts[1], counts[4]};
    std::vector<double> probs{0.2, 0.5, 0.3};
    CHECK(chi_square_gof(obs, probs).p_value > 1e-3);
}

TEST_CASE("iid sums have the same law on both sampling paths") {
    // Loop path (count below the threshold) vs multinomial path; both must
    // produce the exact law of the count-fold convolution.
    DiscreteLaw law({{0, 0.3}, {1, 0.5}, {3, 0.2}});
    DiscreteLaw exact = law.power_convolve(300);

    Rng rng(123);
    std::map<std::uint64_t, std::uint64_t> counts;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ++counts[law.sample_iid_sum(300, rng)];

    std::vector<std::uint64_t> obs;
    std::vector<double> probs;
    for (const auto& [v, p] : exact.atoms()) {
        obs.push_back(counts.count(v) ? counts[v] : 0);
        probs.push_back(p);
        counts.erase(v);
    }
    CHECK(counts.empty());  // nothing outside the exact support
    CHECK(chi_square_gof(obs, probs).p_value > 1e-3);
}

TEST_CASE("vector law marginals, sums and size biasing") {
    VectorLaw law(2, {{{2, 0}, 0.5}, {{0, 1}, 0.5}});
    CHECK(law.component_mean(0) == doctest::Approx(1.0));
    CHECK(law.component_mean(1) == doctest::Approx(0.5));
    CHECK(law.total_mean() == doctest::Approx(1.5));
    CHECK(law.sum_law().mass_at(2) == doctest::Approx(0.5));
    CHECK(law.marginal(1).mass_at(1) == doctest::Approx(0.5));

    VectorLaw sb = law.sum_size_biased();
    CHECK(sb.mass_of({2, 0}) == doctest::Approx(2.0 / 1.5 * 0.5));
    CHECK(sb.mass_of({0, 1}) == doctest::Approx(1.0 / 1.5 * 0.5));
}

TEST_CASE("vector convolution cap raises the expansion error") {
    std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms;
    for (std::uint64_t i = 0; i < 5; ++i) {
        atoms.push_back({{i, 0}, 0.1});
        atoms.push_back({{0, i + 1}, 0.1});
    }
    VectorLaw law(2, std::move(atoms));
    CHECK_THROWS_AS(law.power_convolve(6, 100), ExpansionTooLarge);
}

TEST_CASE("vector iid sums agree with the exact convolution") {
    VectorLaw law(2, {{{1, 0}, 0.4}, {{0, 1}, 0.4}, {{0, 0}, 0.2}});
    VectorLaw exact = law.power_convolve(400);
    Rng rng(321);
    std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> acc(2, 0);
        law.sample_iid_sum_into(400, rng, acc);
        ++counts[acc];
    }
    std::vector<std::uint64_t> obs;
    std::vector<double> probs;
    for (const auto& [v, p] : exact.atoms()) {
        auto it = counts.find(v);
        obs.push_back(it == counts.end() ? 0 : it->second);
        probs.push_back(p);
        if (it != counts.end()) counts.erase(it);
    }
    CHECK(counts.empty());
    CHECK(chi_square_gof(obs, probs).p_value > 1e-3);
}
