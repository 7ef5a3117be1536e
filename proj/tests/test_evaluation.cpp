#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "onrank/core.hpp"
#include "onrank/environments.hpp"
#include "onrank/evaluation.hpp"
#include "onrank/learners.hpp"

using namespace onrank;

namespace {

double brute_force_min(const FeedbackSequence& seq, std::size_t prefix) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pi : all_rankings(seq.n)) {
        double total = 0.0;
        for (std::size_t t = 0; t < prefix; ++t) total += pairwise_loss(pi, seq[t]);
        best = std::min(best, total);
    }
    return best;
}

FeedbackSequence real_sequence(std::size_t n, std::size_t horizon, RngStream& rng) {
    FeedbackSequence seq{Setting::general(), n, {}, ""};
    for (std::size_t t = 0; t < horizon; ++t) {
        std::vector<double> s(n);
        for (auto& x : s) x = std::floor(rng.uniform() * 7.0) - 3.0;
        seq.steps.push_back(Feedback::real_valued(s));
    }
    return seq;
}

}  // namespace

TEST_CASE("sort_decreasing breaks ties toward the lower index") {
    const std::vector<double> scores{1.0, 3.0, 1.0, 3.0, -2.0};
    CHECK(sort_decreasing(scores).order() == std::vector<Item>{1, 3, 0, 2, 4});
}

TEST_CASE("hindsight_best attains the brute-force minimum") {
    RngStream rng(1, 0);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            const std::vector<FeedbackSequence> sequences{uniform_single_choice(n, 15, rng),
                                                          uniform_general(n, 15, rng),
                                                          real_sequence(n, 15, rng)};
            for (const auto& seq : sequences) {
                CHECK(total_pairwise_loss(hindsight_best(seq), seq) == brute_force_min(seq, seq.size()));
            }
        }
    }
    CHECK_THROWS_AS(hindsight_best(FeedbackSequence{Setting::single(), 3, {}, ""}), std::invalid_argument);
}

TEST_CASE("cumulative scores and total losses") {
    FeedbackSequence seq{Setting::single(), 3, {Feedback::single_choice(3, 2), Feedback::single_choice(3, 2),
                                                 Feedback::single_choice(3, 0)}, ""};
    CHECK(cumulative_scores(seq) == std::vector<double>{1.0, 0.0, 2.0});
    CHECK(hindsight_best(seq).order() == std::vector<Item>{2, 0, 1});
    const auto id = Ranking::identity(3);
    CHECK(total_pairwise_loss(id, seq) == 4.0);
    CHECK(total_position_loss(id, seq) == 7.0);
}

TEST_CASE("bound formulas") {
    CHECK(regret_upper_bound(10, 2000, 10.0) == doctest::Approx(1177.41).epsilon(1e-5));
    CHECK(regret_upper_bound(10, 2000, 30.0) == doctest::Approx(2039.33).epsilon(1e-5));
    CHECK(regret_lower_bound(100, 10000, 1.0) == doctest::Approx(300.0));
    CHECK(expected_step_loss_uniform(10) == 4.5);
}

TEST_CASE("play records losses and prefix regret against a brute-force optimum") {
    RngStream adv(2, 0);
    const auto seq = uniform_general(5, 40, adv);
    LearnerSpec spec;
    auto learner = make_learner(spec, Setting::general(), 5, 40);
    RngStream rng(2, 1);
    const auto record = play(*learner, seq, rng, {8, true});
    REQUIRE(record.steps.size() == 40);

    double cumulative = 0.0;
    int checkpoints = 0;
    for (std::size_t t = 0; t < 40; ++t) {
        const auto& step = record.steps[t];
        REQUIRE(step.ranking.has_value());
        CHECK(step.pairwise_loss == pairwise_loss(*step.ranking, seq[t]));
        CHECK(step.position_loss == position_loss(*step.ranking, seq[t]));
        cumulative += step.pairwise_loss;
        CHECK(step.cumulative_pairwise_loss == cumulative);
        if (step.prefix_regret) {
            ++checkpoints;
            CHECK(*step.prefix_regret == doctest::Approx(cumulative - brute_force_min(seq, t + 1)));
        }
    }
    CHECK(checkpoints == 8);
    CHECK(record.steps.back().prefix_regret.has_value());
    CHECK(*record.steps.back().prefix_regret == doctest::Approx(record.regret()));
    CHECK(record.hindsight_pairwise_loss == brute_force_min(seq, 40));
    // Regret is the same under either loss.
    CHECK(record.regret_by_position_loss() == doctest::Approx(record.regret()));
}

TEST_CASE("mean zero-indexed loss") {
    FeedbackSequence seq{Setting::single(), 3, {Feedback::single_choice(3, 0), Feedback::single_choice(3, 1)}, ""};
    FplConfig c;
    c.epsilon = std::numeric_limits<double>::infinity();
    FplLearner learner(3, c);
    RngStream rng(3, 1);
    const auto record = play(learner, seq, rng, {0, false});
    // Round 1: identity ranking, item 0 at position 1. Round 2: item 0 leads,
    // then item 1 at position 2.
    CHECK(record.cumulative_position_loss == 3.0);
    CHECK(record.mean_zero_indexed_loss(seq) == 0.5);
    for (const auto& step : record.steps) CHECK_FALSE(step.prefix_regret.has_value());
}

TEST_CASE("mean estimates") {
    const std::vector<double> values{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate_mean(values);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.count == 4);
    const std::vector<double> one{7.0};
    CHECK(estimate_mean(one).std_error == 0.0);
}

TEST_CASE("bound report carries a lower bound only for choice settings") {
    RunRecord single;
    single.n = 10;
    single.setting = Setting::single();
    single.cumulative_pairwise_loss = 30.0;
    single.hindsight_pairwise_loss = 10.0;
    std::vector<RunRecord> runs{single, single};
    auto report = make_bound_report(runs, 2000);
    CHECK(report.upper_bound == doctest::Approx(1177.41).epsilon(1e-5));
    CHECK(report.regret.mean == 20.0);
    CHECK(report.lower_bound.has_value());
    for (auto& r : runs) r.setting = Setting::general();
    CHECK_FALSE(make_bound_report(runs, 2000).lower_bound.has_value());
}

TEST_CASE("marginal test agrees with the logistic marginals") {
    const WeightVector w({0.5, -1.0, 2.0, 0.0, 1.0});
    const auto pairs = all_pairs(5);
    CHECK(pairs.size() == 10);
    RngStream rng(4, 0);
    const auto report = marginal_test(SamplerKind::plackett_luce_gumbel, w, pairs, 20000, rng);
    CHECK(report.pairs.size() == 10);
    CHECK(report.pass_rate() == 1.0);
    for (const auto& p : report.pairs) CHECK(p.predicted == doctest::Approx(pairwise_marginal(w, p.u, p.v)));
    CHECK_THROWS_AS(marginal_test(SamplerKind::quicksort, w, pairs, 99, rng), std::invalid_argument);
}

TEST_CASE("ranking index enumerates rankings in lexicographic order") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(6) == 720);
    const auto all = all_rankings(5);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(ranking_index(all[i]) == i);
}

TEST_CASE("chi-square goodness of fit") {
    const std::vector<std::uint64_t> exact{10, 20, 30};
    const std::vector<double> p{1.0 / 6, 1.0 / 3, 1.0 / 2};
    const auto perfect = chi_square_goodness_of_fit(exact, p);
    CHECK(perfect.statistic == doctest::Approx(0.0));
    CHECK(perfect.degrees_of_freedom == 2.0);
    CHECK(perfect.p_value == doctest::Approx(1.0));

    // (44 - 50)^2 / 50 * 2 = 1.44 with one degree of freedom.
    const std::vector<std::uint64_t> coin{44, 56};
    const std::vector<double> fair{0.5, 0.5};
    const auto r = chi_square_goodness_of_fit(coin, fair);
    CHECK(r.statistic == doctest::Approx(1.44));
    CHECK(r.p_value == doctest::Approx(0.2301393).epsilon(1e-6));
}

TEST_CASE("chi-square homogeneity") {
    // Expected 15 in every cell: 4 * 25 / 15.
    const std::vector<std::uint64_t> a{10, 20, 0};
    const std::vector<std::uint64_t> b{20, 10, 0};
    const auto r = chi_square_homogeneity(a, b);
    CHECK(r.statistic == doctest::Approx(20.0 / 3.0));
    CHECK(r.degrees_of_freedom == 1.0);
    CHECK(r.p_value == doctest::Approx(0.0098232).epsilon(1e-5));
}

TEST_CASE("hindsight examples") {
    FeedbackSequence counts{Setting::single(), 3, {}, ""};
    for (int i = 0; i < 5; ++i) counts.steps.push_back(Feedback::single_choice(3, 0));
    for (int i = 0; i < 2; ++i) counts.steps.push_back(Feedback::single_choice(3, 1));
    for (int i = 0; i < 9; ++i) counts.steps.push_back(Feedback::single_choice(3, 2));
    CHECK(hindsight_best(counts).order() == std::vector<Item>{2, 0, 1});

    const auto sigma = Ranking::from_positions({4, 2, 5, 1, 3});
    FeedbackSequence sp{Setting::spearman(), 5, {Feedback::spearman(sigma)}, ""};
    CHECK(hindsight_best(sp) == sigma);

    FeedbackSequence always_a{Setting::single(), 4, std::vector<Feedback>(7, Feedback::single_choice(4, 0)), ""};
    CHECK(total_pairwise_loss(hindsight_best(always_a), always_a) == 0.0);
    CHECK(total_pairwise_loss(Ranking::identity(4), FeedbackSequence{Setting::single(), 4, {}, ""}) == 0.0);
}

TEST_CASE("expected uniform step loss for two items") { CHECK(expected_step_loss_uniform(2) == 0.5); }
