#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "onrank/core.hpp"
#include "onrank/samplers.hpp"

using namespace onrank;

namespace {

using Distribution = std::map<std::vector<Item>, double>;

// Exact Plackett-Luce law: product of softmax choices over the remaining items.
double pl_probability(const std::vector<double>& w, const std::vector<Item>& order) {
    double p = 1.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        double z = 0.0;
        for (std::size_t j = i; j < order.size(); ++j) z += std::exp(w[order[j]]);
        p *= std::exp(w[order[i]]) / z;
    }
    return p;
}

// Exact law of noisy quicksort on a set of items, by enumerating pivots and
// left/right assignments.
Distribution quicksort_law(const std::vector<double>& w, const std::vector<Item>& items) {
    Distribution out;
    if (items.size() <= 1) {
        out[items] = 1.0;
        return out;
    }
    const double pick = 1.0 / static_cast<double>(items.size());
    for (Item pivot : items) {
        std::vector<Item> rest;
        for (Item v : items) {
            if (v != pivot) rest.push_back(v);
        }
        for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
            std::vector<Item> left;
            std::vector<Item> right;
            double p = pick;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                const double go_left = std::exp(w[rest[i]]) / (std::exp(w[rest[i]]) + std::exp(w[pivot]));
                if (mask & (1u << i)) {
                    left.push_back(rest[i]);
                    p *= go_left;
                } else {
                    right.push_back(rest[i]);
                    p *= 1.0 - go_left;
                }
            }
            for (const auto& [lo, pl] : quicksort_law(w, left)) {
                for (const auto& [ro, pr] : quicksort_law(w, right)) {
                    auto order = lo;
                    order.push_back(pivot);
                    order.insert(order.end(), ro.begin(), ro.end());
                    out[order] += p * pl * pr;
                }
            }
        }
    }
    return out;
}

// Pearson statistic against exact probabilities.
double pearson(const std::map<std::vector<Item>, int>& counts, const Distribution& law, int draws) {
    double chi2 = 0.0;
    for (const auto& [order, p] : law) {
        const double expected = p * draws;
        const auto it = counts.find(order);
        const double observed = it == counts.end() ? 0.0 : it->second;
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    return chi2;
}

std::map<std::vector<Item>, int> histogram(SamplerKind kind, const WeightVector& w, int draws, std::uint64_t seed) {
    RngStream rng(seed, 0);
    std::map<std::vector<Item>, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[sample_ranking(kind, w, rng).order()];
    return counts;
}

constexpr double kChi2Df23 = 55.0;  // above the 0.9999 quantile of chi-square(23), about 52.6

}  // namespace

TEST_CASE("logistic and pairwise marginal values") {
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75));
    CHECK(logistic(-800.0) >= 0.0);
    CHECK(logistic(800.0) == 1.0);

    const WeightVector w({std::log(3.0), 0.0, -800.0, 800.0});
    CHECK(pairwise_marginal(w, 0, 1) == doctest::Approx(0.75));
    CHECK(pairwise_marginal(w, 1, 0) == doctest::Approx(0.25));
    CHECK(pairwise_marginal(w, 2, 3) > 0.0);
    CHECK(pairwise_marginal(w, 3, 2) == 1.0);
    CHECK(log_pairwise_marginal(w, 2, 3) == doctest::Approx(-1600.0));
    CHECK(log_pairwise_marginal(w, 0, 1) == doctest::Approx(std::log(0.75)));
}

TEST_CASE("weight vector rejects non-finite values") {
    CHECK_THROWS_AS(WeightVector({0.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
    WeightVector w(2);
    CHECK_THROWS_AS(w.add(0, std::numeric_limits<double>::quiet_NaN()), std::overflow_error);
    w.add(0, std::numeric_limits<double>::max());
    CHECK_THROWS_AS(w.add(0, std::numeric_limits<double>::max()), std::overflow_error);
    CHECK(w[0] == std::numeric_limits<double>::max());
    CHECK_THROWS_AS(w.set(1, -std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("sampler names round-trip") {
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        CHECK(parse_sampler_kind(to_string(kind)) == kind);
    }
    CHECK(to_string(SamplerKind::plackett_luce) == "pl");
    CHECK_THROWS_AS(parse_sampler_kind("gumbel"), std::invalid_argument);
}

TEST_CASE("zero weights give the uniform law: each item leads with probability 1/n") {
    const WeightVector w(3);
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        RngStream rng(17, 0);
        constexpr int draws = 60000;
        std::vector<int> first(3, 0);
        for (int i = 0; i < draws; ++i) ++first[sample_ranking(kind, w, rng).order()[0]];
        for (int c : first) {
            const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / draws);
            CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 3.0) < 5 * se);
        }
    }
}

TEST_CASE("sequential and Gumbel Plackett-Luce follow the exact law") {
    const std::vector<double> weights{0.8, -0.4, 1.5, 0.0};
    const WeightVector w(weights);
    Distribution law;
    for (const auto& pi : all_rankings(4)) law[pi.order()] = pl_probability(weights, pi.order());
    constexpr int draws = 200000;
    CHECK(pearson(histogram(SamplerKind::plackett_luce, w, draws, 1), law, draws) < kChi2Df23);
    CHECK(pearson(histogram(SamplerKind::plackett_luce_gumbel, w, draws, 2), law, draws) < kChi2Df23);
}

TEST_CASE("noisy quicksort follows its exact recursive law") {
    const std::vector<double> weights{0.8, -0.4, 1.5, 0.0};
    const WeightVector w(weights);
    const auto law = quicksort_law(weights, {0, 1, 2, 3});
    double total = 0.0;
    for (const auto& [order, p] : law) total += p;
    REQUIRE(total == doctest::Approx(1.0));
    REQUIRE(law.size() == 24);
    constexpr int draws = 200000;
    CHECK(pearson(histogram(SamplerKind::quicksort, w, draws, 3), law, draws) < kChi2Df23);
}

TEST_CASE("exact quicksort law has logistic pairwise marginals") {
    const std::vector<double> weights{0.8, -0.4, 1.5, 0.0, -2.0};
    const auto law = quicksort_law(weights, {0, 1, 2, 3, 4});
    const WeightVector w(weights);
    for (Item u = 0; u < 5; ++u) {
        for (Item v = 0; v < 5; ++v) {
            if (u == v) continue;
            double p = 0.0;
            for (const auto& [order, q] : law) {
                const auto pu = std::find(order.begin(), order.end(), u);
                const auto pv = std::find(order.begin(), order.end(), v);
                if (pu < pv) p += q;
            }
            CHECK(p == doctest::Approx(pairwise_marginal(w, u, v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("extreme weights produce deterministic valid rankings") {
    const WeightVector w({-700.0, 700.0, 0.0, 350.0});
    RngStream rng(9, 0);
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        for (int i = 0; i < 50; ++i) CHECK(sample_ranking(kind, w, rng).order() == std::vector<Item>{1, 3, 2, 0});
    }
}

TEST_CASE("quicksort survives a large sorted weight vector") {
    // Gaps of 50 make every comparison deterministic up to e^-50.
    constexpr std::size_t n = 200000;
    std::vector<double> weights(n);
    for (std::size_t u = 0; u < n; ++u) weights[u] = -50.0 * static_cast<double>(u);
    const WeightVector w(weights);
    RngStream rng(4, 0);
    const auto pi = quicksort_sample(w, rng);
    CHECK(pi.size() == n);
    CHECK(pi == Ranking::identity(n));
}

TEST_CASE("a single item gives the unique ranking") {
    const WeightVector w(1);
    RngStream rng(10, 0);
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        CHECK(sample_ranking(kind, w, rng) == Ranking::identity(1));
    }
}

TEST_CASE("equal weights give the uniform law over all 120 rankings of 5 items") {
    const WeightVector w(5);
    Distribution law;
    for (const auto& pi : all_rankings(5)) law[pi.order()] = 1.0 / 120.0;
    constexpr int draws = 1000000;
    // df = 119; the 0.9999 quantile is about 180.
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        CHECK(pearson(histogram(kind, w, draws, 11), law, draws) < 180.0);
    }
}

TEST_CASE("Plackett-Luce chain rule on weights log 1, log 2, log 3") {
    const std::vector<double> weights{0.0, std::log(2.0), std::log(3.0)};
    CHECK(pl_probability(weights, {2, 1, 0}) == doctest::Approx(1.0 / 3.0));
    const WeightVector w(weights);
    constexpr int draws = 200000;
    for (auto kind : {SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        const auto counts = histogram(kind, w, draws, 12);
        const double freq = counts.at({2, 1, 0}) / static_cast<double>(draws);
        CHECK(std::abs(freq - 1.0 / 3.0) < 5 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / draws));
    }
}

TEST_CASE("a weight gap of 10 makes the inversion rare") {
    const WeightVector w({0.0, 10.0});
    CHECK(pairwise_marginal(w, 0, 1) == doctest::Approx(1.0 / (1.0 + std::exp(10.0))));
    constexpr int draws = 100000;
    for (auto kind : {SamplerKind::quicksort, SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        RngStream rng(13, 0);
        int inverted = 0;
        for (int i = 0; i < draws; ++i) inverted += sample_ranking(kind, w, rng).beats(0, 1) ? 1 : 0;
        CHECK(inverted / static_cast<double>(draws) <= 1e-3);
    }
}

TEST_CASE("a dominant weight leads almost always") {
    const WeightVector w({0.0, 0.0, 20.0, 0.0, 0.0});
    constexpr int draws = 10000;
    for (auto kind : {SamplerKind::plackett_luce, SamplerKind::plackett_luce_gumbel}) {
        RngStream rng(14, 0);
        int first = 0;
        for (int i = 0; i < draws; ++i) first += sample_ranking(kind, w, rng).position(2) == 1 ? 1 : 0;
        CHECK(first / static_cast<double>(draws) >= 0.999);
    }
}
