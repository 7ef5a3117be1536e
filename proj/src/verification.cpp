#include "onrank/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "onrank/core.hpp"
#include "onrank/environments.hpp"
#include "onrank/evaluation.hpp"
#include "onrank/harness.hpp"
#include "onrank/learners.hpp"
#include "onrank/samplers.hpp"

namespace onrank {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps timed sampler calls from being optimized away.
volatile std::size_t g_sink = 0;

CheckResult timed(std::string id, std::string title, const std::function<bool(std::ostringstream&)>& body) {
    CheckResult r;
    r.id = std::move(id);
    r.title = std::move(title);
    std::ostringstream detail;
    const auto start = Clock::now();
    try {
        r.passed = body(detail);
    } catch (const std::exception& e) {
        r.passed = false;
        detail << "exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.detail = detail.str();
    return r;
}

WeightVector random_weights(std::size_t n, double bound, RngStream& rng) {
    std::vector<double> w(n);
    for (auto& x : w) x = -bound + 2.0 * bound * rng.uniform();
    return WeightVector(std::move(w));
}

// cost[u][v]: total pairwise loss charged when u is ranked ahead of v.
std::vector<std::vector<double>> pair_costs(const FeedbackSequence& seq) {
    std::vector<std::vector<double>> cost(seq.n, std::vector<double>(seq.n, 0.0));
    for (const auto& s : seq.steps) {
        for (std::size_t u = 0; u < seq.n; ++u) {
            for (std::size_t v = 0; v < seq.n; ++v) {
                if (u != v) cost[u][v] += std::max(s[v] - s[u], 0.0);
            }
        }
    }
    return cost;
}

double brute_force_min_loss(const FeedbackSequence& seq, const std::vector<Ranking>& rankings) {
    const auto cost = pair_costs(seq);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pi : rankings) {
        const auto order = pi.order();
        double total = 0.0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) total += cost[order[i]][order[j]];
        }
        best = std::min(best, total);
    }
    return best;
}

std::vector<double> regrets_for(const ExperimentConfig& config) {
    std::vector<double> regrets;
    for (const auto& r : run(config)) regrets.push_back(r.record.regret());
    return regrets;
}

ExperimentConfig online_rank_config(Setting setting, std::size_t n, std::int64_t horizon, std::size_t seeds) {
    ExperimentConfig c;
    c.setting = setting;
    c.n = n;
    c.horizon = horizon;
    c.learner.kind = LearnerKind::online_rank;
    c.learner.sampler = SamplerKind::plackett_luce_gumbel;
    c.seeds.clear();
    for (std::size_t s = 1; s <= seeds; ++s) c.seeds.push_back(s);
    c.checkpoints = 0;
    c.record_rankings = false;
    return c;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CheckResult check_pairwise_marginals() {
    return timed("AC1", "pairwise marginals of quicksort and sequential Plackett-Luce", [](std::ostringstream& out) {
        constexpr std::size_t n = 8;
        constexpr std::int64_t draws = 100000;
        const auto pairs = all_pairs(n);
        RngStream weight_rng(2024, 0);
        bool ok = true;
        for (SamplerKind sampler : {SamplerKind::quicksort, SamplerKind::plackett_luce}) {
            std::size_t passed = 0;
            std::size_t total = 0;
            double worst = 0.0;
            for (int vec = 0; vec < 20; ++vec) {
                const auto w = random_weights(n, 3.0, weight_rng);
                RngStream rng(7000 + static_cast<std::uint64_t>(vec), static_cast<std::uint64_t>(sampler) + 1);
                const auto report = marginal_test(sampler, w, pairs, draws, rng, 4.0);
                passed += report.passed_count();
                total += report.pairs.size();
                for (const auto& p : report.pairs) worst = std::max(worst, std::abs(p.z));
            }
            const double rate = static_cast<double>(passed) / static_cast<double>(total);
            out << to_string(sampler) << ": " << passed << "/" << total << " pairs within 4 SE (max |z| " << worst
                << "); ";
            ok = ok && rate >= 0.95;
        }
        return ok;
    });
}

CheckResult check_sampler_equivalence() {
    return timed("AC2", "Gumbel sort matches sequential Plackett-Luce over all rankings", [](std::ostringstream& out) {
        constexpr std::size_t n = 4;
        constexpr std::int64_t draws = 1000000;
        RngStream weight_rng(4242, 0);
        bool ok = true;
        out << "p-values:";
        for (int vec = 0; vec < 5; ++vec) {
            const auto w = random_weights(n, 2.0, weight_rng);
            std::vector<std::uint64_t> gumbel(factorial(n), 0);
            std::vector<std::uint64_t> sequential(factorial(n), 0);
            RngStream rng_g(900 + static_cast<std::uint64_t>(vec), 1);
            RngStream rng_s(900 + static_cast<std::uint64_t>(vec), 2);
            for (std::int64_t i = 0; i < draws; ++i) {
                ++gumbel[ranking_index(plackett_luce_gumbel(w, rng_g))];
                ++sequential[ranking_index(plackett_luce_sample(w, rng_s))];
            }
            const auto result = chi_square_homogeneity(gumbel, sequential);
            out << " " << result.p_value;
            ok = ok && result.p_value > 0.001;
        }
        return ok;
    });
}

CheckResult check_loss_offsets() {
    return timed("AC3", "position and pairwise losses differ by a ranking-independent constant",
                 [](std::ostringstream& out) {
                     RngStream rng(31337, 0);
                     std::size_t violations = 0;
                     std::size_t max_mismatches = 0;
                     std::size_t instances = 0;
                     double worst = 0.0;
                     for (std::size_t n = 2; n <= 6; ++n) {
                         const auto rankings = all_rankings(n);
                         for (int kind = 0; kind < 2; ++kind) {
                             for (int rep = 0; rep < 100; ++rep) {
                                 Feedback s;
                                 if (kind == 0) {
                                     std::vector<Item> chosen;
                                     for (Item u = 0; u < n; ++u) {
                                         if (rng.uniform_index(2)) chosen.push_back(u);
                                     }
                                     s = Feedback::general(n, chosen);
                                 } else {
                                     std::vector<double> scores(n);
                                     for (auto& x : scores) x = -3.0 + 6.0 * rng.uniform();
                                     s = Feedback::real_valued(scores);
                                 }
                                 ++instances;
                                 const double base = position_loss(rankings[0], s) - pairwise_loss(rankings[0], s);
                                 double max_pairwise = 0.0;
                                 for (const auto& pi : rankings) {
                                     const double d = position_loss(pi, s) - pairwise_loss(pi, s);
                                     const double rel = std::abs(d - base) / std::max(1.0, std::abs(base));
                                     worst = std::max(worst, rel);
                                     if (rel > 1e-9) ++violations;
                                     max_pairwise = std::max(max_pairwise, pairwise_loss(pi, s));
                                 }
                                 if (kind == 0 && max_pairwise != complexity_of(s)) ++max_mismatches;
                             }
                         }
                     }
                     out << instances << " feedback vectors; worst relative offset spread " << worst
                         << "; offset violations " << violations << "; max-loss mismatches " << max_mismatches;
                     return violations == 0 && max_mismatches == 0;
                 });
}

CheckResult check_hindsight_oracle() {
    return timed("AC4", "hindsight_best equals brute-force minimizer", [](std::ostringstream& out) {
        std::size_t mismatches = 0;
        std::size_t total = 0;
        for (std::size_t n = 3; n <= 7; ++n) {
            const auto rankings = all_rankings(n);
            const std::size_t k = std::max<std::size_t>(1, n / 2);
            for (int rep = 0; rep < 200; ++rep) {
                RngStream rng(100000 + n * 1000 + static_cast<std::uint64_t>(rep), 0);
                for (int kind = 0; kind < 2; ++kind) {
                    const auto seq = kind == 0 ? uniform_single_choice(n, 50, rng) : uniform_k_choice(n, k, 50, rng);
                    const double best = brute_force_min_loss(seq, rankings);
                    const double got = total_pairwise_loss(hindsight_best(seq), seq);
                    ++total;
                    if (got != best) ++mismatches;
                }
            }
        }
        out << total << " sequences, " << mismatches << " mismatches";
        return mismatches == 0;
    });
}

namespace {

CheckResult regret_bound_check(std::string id, Setting setting, double expected_bound) {
    return timed(std::move(id), "OnlineRank regret below n*sqrt(T M log 2) (" + to_string(setting.kind) + ")",
                 [=](std::ostringstream& out) {
                     constexpr std::size_t n = 10;
                     constexpr std::int64_t horizon = 2000;
                     const auto config = online_rank_config(setting, n, horizon, 50);
                     const auto regrets = regrets_for(config);
                     const auto est = estimate_mean(regrets);
                     const double bound = regret_upper_bound(n, horizon, complexity_bound(setting, n));
                     out << "mean regret " << est.mean << " +/- " << est.std_error << " (SE), bound " << bound;
                     return std::abs(bound - expected_bound) < 0.5 && est.mean + 2.0 * est.std_error <= bound;
                 });
}

}  // namespace

CheckResult check_regret_bound_single() { return regret_bound_check("AC5a", Setting::single(), 1177.4); }

CheckResult check_regret_bound_k_choice() { return regret_bound_check("AC5b", Setting::k_choice(3), 2039.3); }

CheckResult check_sqrt_t_scaling() {
    return timed("AC6", "regret grows like sqrt(T) under the uniform adversary", [](std::ostringstream& out) {
        auto config = online_rank_config(Setting::single(), 10, 2000, 100);
        SweepAxes axes;
        axes.horizon = {2000, 8000};
        config.sweep = axes;
        const auto rows = sweep(config);
        const double ratio = rows[1].regret.mean / rows[0].regret.mean;
        out << "mean regret T=2000: " << rows[0].regret.mean << ", T=8000: " << rows[1].regret.mean
            << ", ratio " << ratio;
        return ratio >= 1.5 && ratio <= 2.7;
    });
}

CheckResult check_uniform_step_loss() {
    return timed("AC7", "per-round loss is (n-1)/2 for any learner under the uniform adversary",
                 [](std::ostringstream& out) {
                     constexpr std::size_t n = 10;
                     const double target = expected_step_loss_uniform(n);
                     bool ok = true;
                     for (LearnerKind kind : {LearnerKind::online_rank, LearnerKind::fpl}) {
                         auto config = online_rank_config(Setting::single(), n, 10000, 20);
                         config.learner.kind = kind;
                         std::vector<double> means;
                         for (const auto& r : run(config)) means.push_back(r.record.mean_zero_indexed_loss(r.sequence));
                         const auto est = estimate_mean(means);
                         const bool within = std::abs(est.mean - target) <= 3.0 * est.std_error;
                         out << to_string(kind) << ": " << est.mean << " +/- " << est.std_error << " (target "
                             << target << "); ";
                         ok = ok && within;
                     }
                     return ok;
                 });
}

CheckResult check_runtime_scaling() {
    return timed("AC8", "per-step time of online_rank_step scales as n log n", [](std::ostringstream& out) {
        constexpr int steps = 50;
        constexpr int repeats = 5;
        bool ok = true;
        for (SamplerKind sampler : {SamplerKind::plackett_luce_gumbel, SamplerKind::quicksort}) {
            out << to_string(sampler) << " ratios:";
            double previous = 0.0;
            for (std::size_t n = 1000; n <= 64000; n *= 2) {
                RngStream weight_rng(77, n);
                LearnerConfig config{n, steps + 1, Setting::single(), 0.1, sampler};
                OnlineRankState state{random_weights(n, 3.0, weight_rng), std::vector<double>(n, 0.0), 0};
                RngStream rng(78, n);
                (void)online_rank_step(config, state, rng);  // warm-up
                double best = std::numeric_limits<double>::infinity();
                for (int rep = 0; rep < repeats; ++rep) {
                    const auto start = Clock::now();
                    std::size_t sink = 0;
                    for (int i = 0; i < steps; ++i) sink += online_rank_step(config, state, rng).position(0);
                    const double per_step = std::chrono::duration<double>(Clock::now() - start).count() / steps;
                    g_sink = sink;
                    best = std::min(best, per_step);
                }
                if (previous > 0.0) {
                    const double ratio = best / previous;
                    out << " " << ratio;
                    ok = ok && ratio <= 2.6;
                }
                previous = best;
            }
            out << "; ";
        }
        return ok;
    });
}

CheckResult check_spearman() {
    return timed("AC9", "Spearman rank aggregation", [](std::ostringstream& out) {
        constexpr std::size_t n = 5;
        constexpr std::int64_t horizon = 200;
        auto config = online_rank_config(Setting::spearman(), n, horizon, 10);
        const double eta = auto_eta(Setting::spearman(), n, horizon);
        const double expected_eta = std::sqrt(std::log(2.0)) / (static_cast<double>(n) * std::sqrt(200.0));
        const double cap = 2.0 * std::pow(static_cast<double>(n), 3) * std::sqrt(static_cast<double>(horizon));
        bool ok = std::abs(eta - expected_eta) <= 1e-12 * expected_eta;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double r : regrets_for(config)) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ok = ok && r >= 0.0 && r <= cap;
        }
        out << "eta " << eta << "; regret range [" << lo << ", " << hi << "] vs cap " << cap << "; ";

        // Brute-force maximum total Spearman correlation.
        std::size_t mismatches = 0;
        std::size_t total = 0;
        for (std::size_t m = 2; m <= 6; ++m) {
            const auto rankings = all_rankings(m);
            for (int rep = 0; rep < 50; ++rep) {
                RngStream rng(5000 + m * 100 + static_cast<std::uint64_t>(rep), 0);
                const auto seq = spearman_sequence(m, 20, {}, rng);
                std::vector<Ranking> sigmas;
                for (const auto& s : seq.steps) {
                    std::vector<int> pos(m);
                    for (std::size_t u = 0; u < m; ++u) pos[u] = static_cast<int>(-s[u]);
                    sigmas.push_back(Ranking::from_positions(pos));
                }
                auto correlation = [&](const Ranking& pi) {
                    double rho = 0.0;
                    for (const auto& sigma : sigmas) {
                        for (std::size_t u = 0; u < m; ++u) rho += pi.position(u) * sigma.position(u);
                    }
                    return rho;
                };
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& pi : rankings) best = std::max(best, correlation(pi));
                ++total;
                if (correlation(hindsight_best(seq)) != best) ++mismatches;
            }
        }
        out << total << " aggregation instances, " << mismatches << " mismatches";
        return ok && mismatches == 0;
    });
}

CheckResult check_determinism(const std::filesystem::path& scratch) {
    return timed("AC10", "identical configs give byte-identical outputs", [&](std::ostringstream& out) {
        auto config = online_rank_config(Setting::single(), 10, 400, 3);
        config.checkpoints = 10;
        SweepAxes axes;
        axes.horizon = {200, 400};
        axes.learner = {LearnerKind::online_rank, LearnerKind::fpl};
        axes.sampler = {SamplerKind::plackett_luce_gumbel, SamplerKind::quicksort};
        config.sweep = axes;
        config.threads = 4;

        std::vector<std::filesystem::path> dirs = {scratch / "first", scratch / "second"};
        for (const auto& dir : dirs) {
            std::filesystem::remove_all(dir);
            write_sweep_outputs(config, sweep(config), dir);
            auto single = config;
            single.sweep.reset();
            single.record_rankings = true;
            write_run_outputs(single, run(single), dir);
        }
        bool ok = true;
        for (const char* name : {"sweep.csv", "sweep.json", "steps.csv", "summary.json", "rankings.csv"}) {
            const auto a = read_file(dirs[0] / name);
            const auto b = read_file(dirs[1] / name);
            const bool same = !a.empty() && a == b;
            out << name << (same ? " identical" : " DIFFERS") << "; ";
            ok = ok && same;
        }
        std::filesystem::remove_all(scratch);
        return ok;
    });
}

std::vector<std::string> suite_ids() {
    return {"marginals", "offsets", "hindsight", "regret-bound", "scaling", "spearman", "determinism", "all"};
}

VerificationReport verify(std::string_view suite) {
    const auto ids = suite_ids();
    if (std::find(ids.begin(), ids.end(), suite) == ids.end()) {
        throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
    }
    const bool all = suite == "all";
    VerificationReport report;
    report.suite = std::string(suite);
    auto& checks = report.checks;
    if (all || suite == "marginals") {
        checks.push_back(check_pairwise_marginals());
        checks.push_back(check_sampler_equivalence());
    }
    if (all || suite == "offsets") checks.push_back(check_loss_offsets());
    if (all || suite == "hindsight") checks.push_back(check_hindsight_oracle());
    if (all || suite == "regret-bound") {
        checks.push_back(check_regret_bound_single());
        checks.push_back(check_regret_bound_k_choice());
        checks.push_back(check_uniform_step_loss());
    }
    if (all || suite == "scaling") {
        checks.push_back(check_sqrt_t_scaling());
        checks.push_back(check_runtime_scaling());
    }
    if (all || suite == "spearman") checks.push_back(check_spearman());
    if (all || suite == "determinism") {
        checks.push_back(check_determinism(std::filesystem::temp_directory_path() /
                                           ("onrank-determinism-" + std::to_string(::getpid()))));
    }
    return report;
}

}  // namespace onrank
