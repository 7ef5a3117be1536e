#pragma once

// Items, rankings, feedback and the two per-round losses.
//
// Items are the indices 0..n-1. A Ranking stores, for every item, its
// 1-indexed position; position 1 is the most favorable. Feedback is a dense
// score vector s over items: a 0/1 indicator for the discrete-choice
// settings, or arbitrary reals (s = -sigma in Spearman mode).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace onrank {

using Item = std::size_t;

/// Ground set of n >= 2 items, optionally carrying unique string labels.
class ItemSet {
public:
    explicit ItemSet(std::size_t n);
    explicit ItemSet(std::vector<std::string> labels);

    std::size_t size() const { return n_; }
    bool has_labels() const { return !labels_.empty(); }
    const std::string& label(Item u) const;
    std::optional<Item> find(std::string_view label) const;

private:
    std::size_t n_;
    std::vector<std::string> labels_;
};

class Ranking {
public:
    Ranking() = default;

    /// positions[u] is the 1-based position of item u; must be a bijection
    /// onto {1..n}.
    static Ranking from_positions(std::vector<int> positions);
    /// order[i] is the item placed at position i+1.
    static Ranking from_order(std::span<const Item> order);
    static Ranking identity(std::size_t n);

    std::size_t size() const { return positions_.size(); }
    int position(Item u) const { return positions_[u]; }
    const std::vector<int>& positions() const { return positions_; }
    /// u beats v (u is ranked strictly ahead of v).
    bool beats(Item u, Item v) const { return positions_[u] < positions_[v]; }
    /// Items listed from position 1 to position n.
    std::vector<Item> order() const;

    friend bool operator==(const Ranking&, const Ranking&) = default;

private:
    explicit Ranking(std::vector<int> positions) : positions_(std::move(positions)) {}
    std::vector<int> positions_;
};

/// Every ranking of n items, in lexicographic order of the item sequence.
/// Guarded to n <= 10.
std::vector<Ranking> all_rankings(std::size_t n);

enum class FeedbackKind { single_choice, k_choice, general_binary, real_valued };

class Feedback {
public:
    Feedback() = default;

    static Feedback single_choice(std::size_t n, Item chosen);
    /// 1..k distinct chosen items, k <= n/2.
    static Feedback k_choice(std::size_t n, std::size_t k, std::span<const Item> chosen);
    /// Any subset (possibly empty) of the items.
    static Feedback general(std::size_t n, std::span<const Item> chosen);
    /// Spearman feedback s = -sigma for the permutation sigma.
    static Feedback spearman(const Ranking& sigma);
    static Feedback real_valued(std::vector<double> scores);

    FeedbackKind kind() const { return kind_; }
    std::size_t size() const { return scores_.size(); }
    /// Declared cardinality bound for k-choice feedback, 1 for single choice.
    std::size_t k() const { return k_; }
    double operator[](Item u) const { return scores_[u]; }
    std::span<const double> scores() const { return scores_; }
    bool is_binary() const { return kind_ != FeedbackKind::real_valued; }
    /// Items with s(u) = 1, ascending. Empty for real-valued feedback.
    std::vector<Item> chosen() const;

private:
    Feedback(FeedbackKind kind, std::size_t k, std::vector<double> scores)
        : kind_(kind), k_(k), scores_(std::move(scores)) {}

    FeedbackKind kind_ = FeedbackKind::real_valued;
    std::size_t k_ = 0;
    std::vector<double> scores_;
};

enum class SettingKind { single, k_choice, general, spearman };

struct Setting {
    SettingKind kind = SettingKind::single;
    std::size_t k = 1;  // only meaningful for k_choice

    static Setting single() { return {SettingKind::single, 1}; }
    static Setting k_choice(std::size_t k) { return {SettingKind::k_choice, k}; }
    static Setting general() { return {SettingKind::general, 1}; }
    static Setting spearman() { return {SettingKind::spearman, 1}; }

    /// Throws std::invalid_argument when the setting is not usable with n
    /// items (n < 2, or k outside 1..n/2 for k-choice).
    void validate(std::size_t n) const;
    /// Empty when s conforms to this setting over n items, otherwise the
    /// reason it does not.
    std::optional<std::string> violation(const Feedback& s, std::size_t n) const;

    friend bool operator==(const Setting&, const Setting&) = default;
};

std::string to_string(SettingKind kind);
std::string to_string(FeedbackKind kind);
/// Accepts "single", "k-choice", "general", "spearman".
SettingKind parse_setting_kind(std::string_view text);

/// Upper bound M on the per-round pairwise loss: n, n*k, n^2/4 or n^4.
double complexity_bound(const Setting& setting, std::size_t n);

/// The complexity invariant of a single feedback vector: the sum over
/// unordered pairs of (s(v) - s(u))^2.
double complexity_of(const Feedback& s);

/// sum_u pi(u) * s(u), with 1-indexed positions.
double position_loss(const Ranking& pi, const Feedback& s);

/// sum over u != v of [u beats v] * max(s(v) - s(u), 0).
/// O(n) for binary feedback, O(n log n) otherwise.
double pairwise_loss(const Ranking& pi, const Feedback& s);

/// Contribution of the unordered pair {u, v} to pairwise_loss; symmetric.
double pairwise_loss_term(const Ranking& pi, const Feedback& s, Item u, Item v);

}  // namespace onrank
