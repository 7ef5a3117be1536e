#pragma once

// Hindsight optimum, regret accounting, theoretical bounds and the
// statistical checks used to verify samplers.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "onrank/core.hpp"
#include "onrank/environments.hpp"
#include "onrank/learners.hpp"
#include "onrank/samplers.hpp"

namespace onrank {

/// sum_t s_t(u) for every item.
std::vector<double> cumulative_scores(const FeedbackSequence& seq);

/// Ranking by decreasing score, ties to the lower index.
Ranking sort_decreasing(std::span<const double> scores);

/// Items by decreasing cumulative score (ties to the lower index). Minimizes
/// the total position loss and therefore the total pairwise loss.
Ranking hindsight_best(const FeedbackSequence& seq);

/// sum_t pairwise_loss(pi, s_t); 0 for an empty sequence.
double total_pairwise_loss(const Ranking& pi, const FeedbackSequence& seq);
/// sum_t position_loss(pi, s_t).
double total_position_loss(const Ranking& pi, const FeedbackSequence& seq);

/// n * sqrt(T * M * log 2).
double regret_upper_bound(std::size_t n, std::int64_t horizon, double m);
/// 0.003 * n^{3/2} * sqrt(T * k). Context only: the constants behind its
/// validity range are not known.
double regret_lower_bound(std::size_t n, std::int64_t horizon, double k);
/// (n - 1) / 2: expected 0-indexed position loss of any learner per round
/// under the uniform single-choice adversary.
double expected_step_loss_uniform(std::size_t n);

struct StepRecord {
    std::int64_t t = 0;  // 1-based round
    double position_loss = 0.0;
    double pairwise_loss = 0.0;
    double cumulative_pairwise_loss = 0.0;
    /// Regret against the prefix hindsight optimum, at checkpoint rounds only.
    std::optional<double> prefix_regret;
    std::optional<Ranking> ranking;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    Setting setting;
    LearnerKind learner = LearnerKind::online_rank;
    double rate = 0.0;
    std::vector<StepRecord> steps;
    double cumulative_pairwise_loss = 0.0;
    double cumulative_position_loss = 0.0;
    Ranking hindsight;
    double hindsight_pairwise_loss = 0.0;
    double hindsight_position_loss = 0.0;

    double regret() const { return cumulative_pairwise_loss - hindsight_pairwise_loss; }
    double regret_by_position_loss() const { return cumulative_position_loss - hindsight_position_loss; }
    /// Mean per-round 0-indexed position loss: (position_loss - sum_u s(u)) / T.
    double mean_zero_indexed_loss(const FeedbackSequence& seq) const;
};

struct PlayOptions {
    /// Number of evenly spaced rounds at which the prefix regret is
    /// recorded (the last round is always one of them); 0 disables.
    std::int64_t checkpoints = 100;
    bool record_rankings = false;
};

/// Plays learner against seq for seq.size() rounds.
RunRecord play(Learner& learner, const FeedbackSequence& seq, RngStream& rng, const PlayOptions& options = {});

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(count); 0 for a single value
    std::size_t count = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

struct BoundReport {
    double upper_bound = 0.0;
    std::optional<double> lower_bound;  // only for single and k-choice
    MeanEstimate regret;
    std::size_t seeds = 0;
};

BoundReport make_bound_report(std::span<const RunRecord> runs, std::int64_t horizon);

struct PairCheck {
    Item u = 0;
    Item v = 0;
    double predicted = 0.0;
    double empirical = 0.0;
    double z = 0.0;
    bool passed = false;
};

struct MarginalReport {
    SamplerKind sampler = SamplerKind::plackett_luce_gumbel;
    std::int64_t samples = 0;
    double z_threshold = 4.0;
    std::vector<PairCheck> pairs;

    std::size_t passed_count() const;
    double pass_rate() const;
};

/// Draws `samples` rankings and compares the frequency of u ahead of v with
/// pairwise_marginal(w, u, v) for every requested pair. All pairs share the
/// same draws. Throws std::invalid_argument for samples < 100.
MarginalReport marginal_test(SamplerKind sampler, const WeightVector& w,
                             std::span<const std::pair<Item, Item>> pairs, std::int64_t samples,
                             RngStream& rng, double z_threshold = 4.0);

/// All n(n-1)/2 pairs (u, v) with u < v.
std::vector<std::pair<Item, Item>> all_pairs(std::size_t n);

/// Index of a ranking among all n! rankings (Lehmer code of its order).
std::size_t ranking_index(const Ranking& pi);
std::size_t factorial(std::size_t n);

struct ChiSquareResult {
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
};

/// Goodness of fit of observed counts against expected probabilities.
/// Cells with zero expected probability must have zero counts.
ChiSquareResult chi_square_goodness_of_fit(std::span<const std::uint64_t> counts,
                                           std::span<const double> probabilities);

/// Two-sample homogeneity test on a 2 x K contingency table; cells empty in
/// both samples are dropped.
ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace onrank
