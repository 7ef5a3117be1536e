#include "onrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace onrank {

std::vector<double> cumulative_scores(const FeedbackSequence& seq) {
    std::vector<double> total(seq.n, 0.0);
    for (const auto& s : seq.steps) {
        if (s.size() != seq.n) throw std::invalid_argument("feedback size does not match sequence n");
        for (std::size_t u = 0; u < seq.n; ++u) total[u] += s[u];
    }
    return total;
}

Ranking sort_decreasing(std::span<const double> scores) {
    std::vector<Item> order(scores.size());
    std::iota(order.begin(), order.end(), Item{0});
    std::stable_sort(order.begin(), order.end(), [&scores](Item a, Item b) { return scores[a] > scores[b]; });
    return Ranking::from_order(order);
}

Ranking hindsight_best(const FeedbackSequence& seq) {
    if (seq.empty()) throw std::invalid_argument("hindsight optimum of an empty sequence is undefined");
    const auto total = cumulative_scores(seq);
    return sort_decreasing(total);
}

double total_pairwise_loss(const Ranking& pi, const FeedbackSequence& seq) {
    double total = 0.0;
    for (const auto& s : seq.steps) total += pairwise_loss(pi, s);
    return total;
}

double total_position_loss(const Ranking& pi, const FeedbackSequence& seq) {
    double total = 0.0;
    for (const auto& s : seq.steps) total += position_loss(pi, s);
    return total;
}

double regret_upper_bound(std::size_t n, std::int64_t horizon, double m) {
    return static_cast<double>(n) * std::sqrt(static_cast<double>(horizon) * m * std::log(2.0));
}

double regret_lower_bound(std::size_t n, std::int64_t horizon, double k) {
    const double nd = static_cast<double>(n);
    return 0.003 * nd * std::sqrt(nd) * std::sqrt(static_cast<double>(horizon) * k);
}

double expected_step_loss_uniform(std::size_t n) {
    if (n < 1) throw std::invalid_argument("need at least one item");
    return (static_cast<double>(n) - 1.0) / 2.0;
}

double RunRecord::mean_zero_indexed_loss(const FeedbackSequence& seq) const {
    if (seq.empty()) return 0.0;
    double chosen_mass = 0.0;
    for (const auto& s : seq.steps) {
        for (double x : s.scores()) chosen_mass += x;
    }
    return (cumulative_position_loss - chosen_mass) / static_cast<double>(seq.size());
}

RunRecord play(Learner& learner, const FeedbackSequence& seq, RngStream& rng, const PlayOptions& options) {
    RunRecord record;
    record.seed = rng.seed();
    record.n = seq.n;
    record.setting = seq.setting;
    record.learner = learner.kind();
    record.rate = learner.rate();
    record.steps.reserve(seq.size());

    const auto horizon = static_cast<std::int64_t>(seq.size());
    std::vector<double> prefix_scores(seq.n, 0.0);
    // sum_t (position_loss - pairwise_loss); depends on the feedback only.
    double offset = 0.0;

    for (std::int64_t t = 1; t <= horizon; ++t) {
        const Feedback& s = seq[static_cast<std::size_t>(t - 1)];
        Ranking pi = learner.act(rng);
        StepRecord step;
        step.t = t;
        step.position_loss = position_loss(pi, s);
        step.pairwise_loss = pairwise_loss(pi, s);
        record.cumulative_pairwise_loss += step.pairwise_loss;
        record.cumulative_position_loss += step.position_loss;
        step.cumulative_pairwise_loss = record.cumulative_pairwise_loss;
        offset += step.position_loss - step.pairwise_loss;
        for (std::size_t u = 0; u < seq.n; ++u) prefix_scores[u] += s[u];

        const auto c = options.checkpoints;
        if (c > 0 && (t == horizon || (t * c) / horizon != ((t - 1) * c) / horizon)) {
            const Ranking best = sort_decreasing(prefix_scores);
            double best_position = 0.0;
            for (std::size_t u = 0; u < seq.n; ++u) best_position += best.position(u) * prefix_scores[u];
            step.prefix_regret = record.cumulative_pairwise_loss - (best_position - offset);
        }
        if (options.record_rankings) step.ranking = pi;
        record.steps.push_back(std::move(step));
        learner.observe(s);
    }

    if (!seq.empty()) {
        record.hindsight = hindsight_best(seq);
        record.hindsight_pairwise_loss = total_pairwise_loss(record.hindsight, seq);
        record.hindsight_position_loss = total_position_loss(record.hindsight, seq);
    }
    return record;
}

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate e;
    e.count = values.size();
    if (values.empty()) return e;
    e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double x : values) ss += (x - e.mean) * (x - e.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        e.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return e;
}

BoundReport make_bound_report(std::span<const RunRecord> runs, std::int64_t horizon) {
    if (runs.empty()) throw std::invalid_argument("a bound report needs at least one run");
    const auto& first = runs.front();
    BoundReport report;
    report.upper_bound = regret_upper_bound(first.n, horizon, complexity_bound(first.setting, first.n));
    if (first.setting.kind == SettingKind::single) {
        report.lower_bound = regret_lower_bound(first.n, horizon, 1.0);
    } else if (first.setting.kind == SettingKind::k_choice) {
        report.lower_bound = regret_lower_bound(first.n, horizon, static_cast<double>(first.setting.k));
    }
    std::vector<double> regrets;
    regrets.reserve(runs.size());
    for (const auto& r : runs) regrets.push_back(r.regret());
    report.regret = estimate_mean(regrets);
    report.seeds = runs.size();
    return report;
}

std::size_t MarginalReport::passed_count() const {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const PairCheck& p) { return p.passed; }));
}

double MarginalReport::pass_rate() const {
    if (pairs.empty()) return 1.0;
    return static_cast<double>(passed_count()) / static_cast<double>(pairs.size());
}

MarginalReport marginal_test(SamplerKind sampler, const WeightVector& w,
                             std::span<const std::pair<Item, Item>> pairs, std::int64_t samples,
                             RngStream& rng, double z_threshold) {
    if (samples < 100) throw std::invalid_argument("marginal_test needs at least 100 samples");
    for (const auto& [u, v] : pairs) {
        if (u == v || u >= w.size() || v >= w.size()) throw std::invalid_argument("invalid item pair");
    }
    std::vector<std::int64_t> ahead(pairs.size(), 0);
    for (std::int64_t i = 0; i < samples; ++i) {
        const Ranking pi = sample_ranking(sampler, w, rng);
        for (std::size_t j = 0; j < pairs.size(); ++j) ahead[j] += pi.beats(pairs[j].first, pairs[j].second);
    }

    MarginalReport report;
    report.sampler = sampler;
    report.samples = samples;
    report.z_threshold = z_threshold;
    const double m = static_cast<double>(samples);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        PairCheck check;
        check.u = pairs[j].first;
        check.v = pairs[j].second;
        check.predicted = pairwise_marginal(w, check.u, check.v);
        check.empirical = static_cast<double>(ahead[j]) / m;
        const double se = std::sqrt(check.predicted * (1.0 - check.predicted) / m);
        const double diff = check.empirical - check.predicted;
        if (se > 0.0) {
            check.z = diff / se;
        } else {
            check.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        }
        check.passed = std::abs(check.z) <= z_threshold;
        report.pairs.push_back(check);
    }
    return report;
}

std::vector<std::pair<Item, Item>> all_pairs(std::size_t n) {
    std::vector<std::pair<Item, Item>> out;
    for (Item u = 0; u < n; ++u) {
        for (Item v = u + 1; v < n; ++v) out.emplace_back(u, v);
    }
    return out;
}

std::size_t factorial(std::size_t n) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

std::size_t ranking_index(const Ranking& pi) {
    const auto order = pi.order();
    const auto n = order.size();
    std::size_t index = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller_after = 0;
        for (std::size_t j = i + 1; j < n; ++j) smaller_after += order[j] < order[i];
        index = index * (n - i) + smaller_after;
    }
    return index;
}

namespace {

double upper_tail(double statistic, double dof) {
    if (dof <= 0.0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquareResult chi_square_goodness_of_fit(std::span<const std::uint64_t> counts,
                                           std::span<const double> probabilities) {
    if (counts.size() != probabilities.size()) throw std::invalid_argument("counts and probabilities differ in size");
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    ChiSquareResult r;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = total * probabilities[i];
        if (expected <= 0.0) {
            if (counts[i] != 0) {
                r.statistic = std::numeric_limits<double>::infinity();
                r.p_value = 0.0;
                return r;
            }
            continue;
        }
        const double d = static_cast<double>(counts[i]) - expected;
        r.statistic += d * d / expected;
        ++cells;
    }
    r.degrees_of_freedom = cells > 0 ? static_cast<double>(cells - 1) : 0.0;
    r.p_value = upper_tail(r.statistic, r.degrees_of_freedom);
    return r;
}

ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("samples have different numbers of cells");
    const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
    const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("both samples must be nonempty");
    ChiSquareResult r;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double column = static_cast<double>(a[i] + b[i]);
        if (column == 0.0) continue;
        const double ea = column * na / (na + nb);
        const double eb = column * nb / (na + nb);
        const double da = static_cast<double>(a[i]) - ea;
        const double db = static_cast<double>(b[i]) - eb;
        r.statistic += da * da / ea + db * db / eb;
        ++cells;
    }
    r.degrees_of_freedom = cells > 0 ? static_cast<double>(cells - 1) : 0.0;
    r.p_value = upper_tail(r.statistic, r.degrees_of_freedom);
    return r;
}

}  // namespace onrank
