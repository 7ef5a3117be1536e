#include "onrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace onrank {

namespace {

void require_same_size(const Ranking& pi, const Feedback& s) {
    if (pi.size() != s.size()) {
        throw std::invalid_argument("ranking has " + std::to_string(pi.size()) +
                                    " items but feedback has " + std::to_string(s.size()));
    }
}

std::vector<double> indicator(std::size_t n, std::span<const Item> chosen) {
    std::vector<double> scores(n, 0.0);
    for (Item u : chosen) {
        if (u >= n) {
            throw std::invalid_argument("item " + std::to_string(u) + " out of range for n=" +
                                        std::to_string(n));
        }
        if (scores[u] != 0.0) {
            throw std::invalid_argument("item " + std::to_string(u) + " chosen twice");
        }
        scores[u] = 1.0;
    }
    return scores;
}

// Fenwick tree over value ranks holding (count, sum) of inserted scores.
class PrefixSums {
public:
    explicit PrefixSums(std::size_t size) : count_(size + 1, 0), sum_(size + 1, 0.0) {}

    void add(std::size_t rank, double value) {
        for (std::size_t i = rank + 1; i < count_.size(); i += i & (~i + 1)) {
            count_[i] += 1;
            sum_[i] += value;
        }
    }

    // Count and sum over ranks [0, rank).
    std::pair<std::size_t, double> below(std::size_t rank) const {
        std::size_t c = 0;
        double s = 0.0;
        for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) {
            c += count_[i];
            s += sum_[i];
        }
        return {c, s};
    }

private:
    std::vector<std::size_t> count_;
    std::vector<double> sum_;
};

}  // namespace

ItemSet::ItemSet(std::size_t n) : n_(n) {
    if (n < 2) throw std::invalid_argument("an item set needs at least 2 items");
}

ItemSet::ItemSet(std::vector<std::string> labels) : n_(labels.size()), labels_(std::move(labels)) {
    if (n_ < 2) throw std::invalid_argument("an item set needs at least 2 items");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw std::invalid_argument("duplicate item label '" + l + "'");
    }
}

const std::string& ItemSet::label(Item u) const {
    if (!has_labels()) throw std::logic_error("item set has no labels");
    return labels_.at(u);
}

std::optional<Item> ItemSet::find(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<Item>(it - labels_.begin());
}

Ranking Ranking::from_positions(std::vector<int> positions) {
    const auto n = positions.size();
    std::vector<bool> used(n, false);
    for (int p : positions) {
        if (p < 1 || static_cast<std::size_t>(p) > n || used[p - 1]) {
            throw std::invalid_argument("positions are not a bijection onto 1.." + std::to_string(n));
        }
        used[p - 1] = true;
    }
    return Ranking(std::move(positions));
}

Ranking Ranking::from_order(std::span<const Item> order) {
    const auto n = order.size();
    std::vector<int> positions(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Item u = order[i];
        if (u >= n || positions[u] != 0) {
            throw std::invalid_argument("order is not a permutation of 0.." + std::to_string(n) + "-1");
        }
        positions[u] = static_cast<int>(i + 1);
    }
    return Ranking(std::move(positions));
}

Ranking Ranking::identity(std::size_t n) {
    std::vector<int> positions(n);
    std::iota(positions.begin(), positions.end(), 1);
    return Ranking(std::move(positions));
}

std::vector<Item> Ranking::order() const {
    std::vector<Item> out(positions_.size());
    for (std::size_t u = 0; u < positions_.size(); ++u) out[positions_[u] - 1] = u;
    return out;
}

std::vector<Ranking> all_rankings(std::size_t n) {
    if (n > 10) throw std::invalid_argument("refusing to enumerate more than 10! rankings");
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    std::vector<Ranking> out;
    do {
        out.push_back(Ranking::from_order(order));
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

Feedback Feedback::single_choice(std::size_t n, Item chosen) {
    const Item items[] = {chosen};
    return Feedback(FeedbackKind::single_choice, 1, indicator(n, items));
}

Feedback Feedback::k_choice(std::size_t n, std::size_t k, std::span<const Item> chosen) {
    if (k < 1 || 2 * k > n) {
        throw std::invalid_argument("k-choice requires 1 <= k <= n/2 (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    if (chosen.empty() || chosen.size() > k) {
        throw std::invalid_argument("k-choice feedback must choose between 1 and " +
                                    std::to_string(k) + " items, got " +
                                    std::to_string(chosen.size()));
    }
    return Feedback(FeedbackKind::k_choice, k, indicator(n, chosen));
}

Feedback Feedback::general(std::size_t n, std::span<const Item> chosen) {
    return Feedback(FeedbackKind::general_binary, n, indicator(n, chosen));
}

Feedback Feedback::spearman(const Ranking& sigma) {
    std::vector<double> scores(sigma.size());
    for (std::size_t u = 0; u < sigma.size(); ++u) scores[u] = -static_cast<double>(sigma.position(u));
    return Feedback(FeedbackKind::real_valued, 0, std::move(scores));
}

Feedback Feedback::real_valued(std::vector<double> scores) {
    for (double x : scores) {
        if (!std::isfinite(x)) throw std::invalid_argument("feedback scores must be finite");
    }
    return Feedback(FeedbackKind::real_valued, 0, std::move(scores));
}

std::vector<Item> Feedback::chosen() const {
    std::vector<Item> out;
    if (!is_binary()) return out;
    for (std::size_t u = 0; u < scores_.size(); ++u) {
        if (scores_[u] == 1.0) out.push_back(u);
    }
    return out;
}

void Setting::validate(std::size_t n) const {
    if (n < 2) throw std::invalid_argument("need at least 2 items");
    if (kind == SettingKind::k_choice && (k < 1 || 2 * k > n)) {
        throw std::invalid_argument("k-choice requires 1 <= k <= n/2 (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
}

std::optional<std::string> Setting::violation(const Feedback& s, std::size_t n) const {
    if (s.size() != n) {
        return "feedback has " + std::to_string(s.size()) + " entries, expected " + std::to_string(n);
    }
    const auto scores = s.scores();
    if (kind == SettingKind::spearman) {
        std::vector<bool> seen(n, false);
        for (double x : scores) {
            const double p = -x;
            if (p != std::floor(p) || p < 1 || p > static_cast<double>(n) || seen[static_cast<std::size_t>(p) - 1]) {
                return std::string("spearman feedback must be the negation of a permutation of 1..n");
            }
            seen[static_cast<std::size_t>(p) - 1] = true;
        }
        return std::nullopt;
    }
    std::size_t ones = 0;
    for (double x : scores) {
        if (x != 0.0 && x != 1.0) return std::string("feedback is not a 0/1 indicator");
        ones += x == 1.0;
    }
    if (kind == SettingKind::single && ones != 1) {
        return "single choice requires exactly one chosen item, got " + std::to_string(ones);
    }
    if (kind == SettingKind::k_choice && (ones < 1 || ones > k)) {
        return "k-choice requires between 1 and " + std::to_string(k) + " chosen items, got " +
               std::to_string(ones);
    }
    return std::nullopt;
}

std::string to_string(SettingKind kind) {
    switch (kind) {
        case SettingKind::single: return "single";
        case SettingKind::k_choice: return "k-choice";
        case SettingKind::general: return "general";
        case SettingKind::spearman: return "spearman";
    }
    return "?";
}

std::string to_string(FeedbackKind kind) {
    switch (kind) {
        case FeedbackKind::single_choice: return "single-choice";
        case FeedbackKind::k_choice: return "k-choice";
        case FeedbackKind::general_binary: return "general-binary";
        case FeedbackKind::real_valued: return "real-valued";
    }
    return "?";
}

SettingKind parse_setting_kind(std::string_view text) {
    if (text == "single") return SettingKind::single;
    if (text == "k-choice") return SettingKind::k_choice;
    if (text == "general") return SettingKind::general;
    if (text == "spearman") return SettingKind::spearman;
    throw std::invalid_argument("unknown setting '" + std::string(text) + "'");
}

double complexity_bound(const Setting& setting, std::size_t n) {
    setting.validate(n);
    const double nd = static_cast<double>(n);
    switch (setting.kind) {
        case SettingKind::single: return nd;
        case SettingKind::k_choice: return nd * static_cast<double>(setting.k);
        case SettingKind::general: return nd * nd / 4.0;
        case SettingKind::spearman: return nd * nd * nd * nd;
    }
    return 0.0;
}

double complexity_of(const Feedback& s) {
    const auto scores = s.scores();
    double total = 0.0;
    for (std::size_t u = 0; u < scores.size(); ++u) {
        for (std::size_t v = u + 1; v < scores.size(); ++v) {
            const double d = scores[v] - scores[u];
            total += d * d;
        }
    }
    return total;
}

double position_loss(const Ranking& pi, const Feedback& s) {
    require_same_size(pi, s);
    double total = 0.0;
    for (std::size_t u = 0; u < s.size(); ++u) total += pi.position(u) * s[u];
    return total;
}

double pairwise_loss(const Ranking& pi, const Feedback& s) {
    require_same_size(pi, s);
    const auto order = pi.order();
    if (s.is_binary()) {
        // Each chosen item pays one per unchosen item ahead of it.
        double total = 0.0;
        double unchosen_ahead = 0.0;
        for (Item u : order) {
            if (s[u] == 1.0) {
                total += unchosen_ahead;
            } else {
                unchosen_ahead += 1.0;
            }
        }
        return total;
    }

    // Real-valued: item v at position j pays sum over earlier u with
    // s(u) < s(v) of s(v) - s(u).
    const auto n = s.size();
    std::vector<double> sorted(s.scores().begin(), s.scores().end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    PrefixSums ahead(sorted.size());
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Item v = order[j];
        const auto rank = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), s[v]) - sorted.begin());
        const auto [count, sum] = ahead.below(rank);
        total += static_cast<double>(count) * s[v] - sum;
        ahead.add(rank, s[v]);
    }
    return total;
}

double pairwise_loss_term(const Ranking& pi, const Feedback& s, Item u, Item v) {
    require_same_size(pi, s);
    if (u == v) throw std::invalid_argument("pairwise loss term needs two distinct items");
    if (u >= s.size() || v >= s.size()) throw std::invalid_argument("item out of range");
    const double uv = std::max(s[v] - s[u], 0.0);
    const double vu = std::max(s[u] - s[v], 0.0);
    return pi.beats(u, v) ? uv : vu;
}

}  // namespace onrank
