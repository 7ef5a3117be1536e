#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "onrank/core.hpp"
#include "onrank/environments.hpp"

using namespace onrank;

namespace {

FeedbackSequence parse(const std::string& text, const Setting& setting, std::size_t n) {
    std::istringstream in(text);
    return parse_trace(in, setting, n, "t");
}

std::size_t error_line(const std::string& text, const Setting& setting, std::size_t n) {
    try {
        parse(text, setting, n);
    } catch (const TraceError& e) {
        return e.line();
    }
    FAIL("expected a TraceError");
    return 0;
}

}  // namespace

TEST_CASE("uniform single choice picks each item equally often") {
    RngStream rng(1, 0);
    const auto seq = uniform_single_choice(5, 50000, rng);
    CHECK(seq.size() == 50000);
    CHECK_NOTHROW(seq.validate());
    std::vector<int> counts(5, 0);
    for (const auto& s : seq.steps) {
        const auto chosen = s.chosen();
        REQUIRE(chosen.size() == 1);
        ++counts[chosen[0]];
    }
    const double se = std::sqrt(0.2 * 0.8 / 50000);
    for (int c : counts) CHECK(std::abs(c / 50000.0 - 0.2) < 5 * se);
}

TEST_CASE("uniform k-choice draws k-subsets uniformly") {
    RngStream rng(2, 0);
    constexpr int horizon = 60000;
    const auto seq = uniform_k_choice(4, 2, horizon, rng);
    CHECK_NOTHROW(seq.validate());
    std::map<std::vector<Item>, int> counts;
    for (const auto& s : seq.steps) {
        REQUIRE(s.chosen().size() == 2);
        ++counts[s.chosen()];
    }
    REQUIRE(counts.size() == 6);
    const double se = std::sqrt((1.0 / 6) * (5.0 / 6) / horizon);
    for (const auto& [subset, c] : counts) CHECK(std::abs(c / static_cast<double>(horizon) - 1.0 / 6) < 5 * se);
    CHECK_THROWS_AS(uniform_k_choice(4, 3, 10, rng), std::invalid_argument);
}

TEST_CASE("uniform general feedback includes every item with probability one half") {
    RngStream rng(3, 0);
    constexpr int horizon = 40000;
    const auto seq = uniform_general(6, horizon, rng);
    CHECK_NOTHROW(seq.validate());
    std::vector<int> counts(6, 0);
    int empty = 0;
    for (const auto& s : seq.steps) {
        for (Item u : s.chosen()) ++counts[u];
        empty += s.chosen().empty() ? 1 : 0;
    }
    const double se = std::sqrt(0.25 / horizon);
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(horizon) - 0.5) < 5 * se);
    CHECK(std::abs(empty / static_cast<double>(horizon) - 1.0 / 64) < 5 * std::sqrt((1.0 / 64) / horizon));
}

TEST_CASE("random permutations are uniform") {
    RngStream rng(4, 0);
    constexpr int draws = 60000;
    std::map<std::vector<Item>, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[random_ranking(3, rng).order()];
    REQUIRE(counts.size() == 6);
    const double se = std::sqrt((1.0 / 6) * (5.0 / 6) / draws);
    for (const auto& [order, c] : counts) CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 6) < 5 * se);
}

TEST_CASE("spearman sequences carry s = -sigma") {
    RngStream rng(5, 0);
    const auto sigma = Ranking::from_positions({3, 1, 2, 4});
    const auto fixed = spearman_sequence(4, 3, {SpearmanMode::fixed, sigma, {}}, rng);
    REQUIRE(fixed.size() == 3);
    for (const auto& s : fixed.steps) {
        for (Item u = 0; u < 4; ++u) CHECK(s[u] == -sigma.position(u));
    }
    const auto random = spearman_sequence(4, 50, {}, rng);
    CHECK(random.size() == 50);
    CHECK_NOTHROW(random.validate());
    CHECK_THROWS_AS(spearman_sequence(4, 3, {SpearmanMode::fixed, std::nullopt, {}}, rng), std::invalid_argument);
}

TEST_CASE("same rng key gives the same sequence") {
    RngStream a(6, 0);
    RngStream b(6, 0);
    const auto x = uniform_k_choice(8, 3, 100, a);
    const auto y = uniform_k_choice(8, 3, 100, b);
    for (std::size_t t = 0; t < 100; ++t) CHECK(x[t].chosen() == y[t].chosen());
}

TEST_CASE("trace parsing by setting") {
    const auto single = parse("# header\n2\n\n  0  \n", Setting::single(), 3);
    REQUIRE(single.size() == 2);
    CHECK(single[0].chosen() == std::vector<Item>{2});
    CHECK(single[1].chosen() == std::vector<Item>{0});

    const auto kc = parse("1 3\n2\r\n", Setting::k_choice(2), 4);
    REQUIRE(kc.size() == 2);
    CHECK(kc[0].chosen() == std::vector<Item>{1, 3});
    CHECK(kc[1].chosen() == std::vector<Item>{2});

    const auto general = parse("-\n0 1 2\n", Setting::general(), 3);
    REQUIRE(general.size() == 2);
    CHECK(general[0].chosen().empty());
    CHECK(general[1].chosen().size() == 3);

    // The first listed item is ranked first: s = -position.
    const auto sp = parse("2 0 1\n", Setting::spearman(), 3);
    REQUIRE(sp.size() == 1);
    CHECK(sp[0][2] == -1.0);
    CHECK(sp[0][0] == -2.0);
    CHECK(sp[0][1] == -3.0);
}

TEST_CASE("trace errors report the offending line") {
    CHECK(error_line("0\n1\nx\n", Setting::single(), 3) == 3);
    CHECK(error_line("0\n\n# c\n3\n", Setting::single(), 3) == 4);
    CHECK(error_line("0 1\n", Setting::single(), 3) == 1);
    CHECK(error_line("0\n1 1\n", Setting::k_choice(2), 4) == 2);
    CHECK(error_line("0 1 2\n", Setting::k_choice(2), 4) == 1);
    CHECK(error_line("-\n", Setting::single(), 3) == 1);
    CHECK(error_line("- 1\n", Setting::general(), 3) == 1);
    CHECK(error_line("0 1\n", Setting::spearman(), 3) == 1);
    CHECK(error_line("-1\n", Setting::single(), 3) == 1);
    CHECK(error_line("1.5\n", Setting::single(), 3) == 1);
    CHECK(error_line("0\n", Setting::k_choice(3), 4) == 0);

    try {
        parse("0\n7\n", Setting::single(), 3);
        FAIL("expected a TraceError");
    } catch (const TraceError& e) {
        CHECK(std::string(e.what()).find("t:2:") == 0);
    }
    CHECK_THROWS_AS(load_trace("/nonexistent/trace.txt", Setting::single(), 3), TraceError);
}

TEST_CASE("write then parse reproduces the sequence") {
    RngStream rng(7, 0);
    const std::vector<FeedbackSequence> sequences{
        uniform_single_choice(6, 40, rng), uniform_k_choice(6, 3, 40, rng), uniform_general(6, 40, rng),
        spearman_sequence(6, 40, {}, rng)};
    for (const auto& seq : sequences) {
        std::stringstream text;
        write_trace(text, seq);
        const auto back = parse_trace(text, seq.setting, seq.n);
        REQUIRE(back.size() == seq.size());
        for (std::size_t t = 0; t < seq.size(); ++t) {
            for (Item u = 0; u < seq.n; ++u) CHECK(back[t][u] == seq[t][u]);
        }
    }
}

TEST_CASE("save and load a trace file") {
    RngStream rng(8, 0);
    const auto seq = uniform_k_choice(5, 2, 25, rng);
    const auto path = std::filesystem::temp_directory_path() / "onrank_test_trace.txt";
    save_trace(path, seq);
    const auto back = load_trace(path, Setting::k_choice(2), 5);
    std::filesystem::remove(path);
    REQUIRE(back.size() == 25);
    for (std::size_t t = 0; t < 25; ++t) CHECK(back[t].chosen() == seq[t].chosen());
}

TEST_CASE("sequence validation names the bad step") {
    FeedbackSequence seq{Setting::single(), 4, {Feedback::single_choice(4, 1), Feedback::single_choice(5, 1)}, ""};
    try {
        seq.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("uniform Spearman feedback averages to -(n+1)/2") {
    RngStream rng(9, 0);
    constexpr int horizon = 20000;
    const auto seq = spearman_sequence(5, horizon, {}, rng);
    std::vector<double> sums(5, 0.0);
    for (const auto& s : seq.steps) {
        for (Item u = 0; u < 5; ++u) sums[u] += s[u];
    }
    // Each coordinate is uniform on {-1..-5}: variance 2.
    for (double x : sums) CHECK(std::abs(x / horizon + 3.0) < 5 * std::sqrt(2.0 / horizon));
}

TEST_CASE("trace examples") {
    CHECK(parse("", Setting::single(), 5).empty());
    const auto one = parse("3\n", Setting::single(), 5);
    REQUIRE(one.size() == 1);
    CHECK(one[0].chosen() == std::vector<Item>{3});
    CHECK(error_line("1 1 2\n", Setting::general(), 5) == 1);
}
