#include "onrank/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace onrank {

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
    for (double x : w_) {
        if (!std::isfinite(x)) throw std::invalid_argument("weights must be finite");
    }
}

void WeightVector::add(Item u, double delta) {
    const double next = w_.at(u) + delta;
    if (!std::isfinite(next)) throw std::overflow_error("weight update produced a non-finite value");
    w_[u] = next;
}

void WeightVector::set(Item u, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("weights must be finite");
    w_.at(u) = value;
}

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::quicksort: return "quicksort";
        case SamplerKind::plackett_luce: return "pl";
        case SamplerKind::plackett_luce_gumbel: return "pl-gumbel";
    }
    return "?";
}

SamplerKind parse_sampler_kind(std::string_view text) {
    if (text == "quicksort") return SamplerKind::quicksort;
    if (text == "pl") return SamplerKind::plackett_luce;
    if (text == "pl-gumbel") return SamplerKind::plackett_luce_gumbel;
    throw std::invalid_argument("unknown sampler '" + std::string(text) + "'");
}

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double pairwise_marginal(const WeightVector& w, Item u, Item v) {
    if (u == v) throw std::invalid_argument("pairwise marginal needs two distinct items");
    if (u >= w.size() || v >= w.size()) throw std::invalid_argument("item out of range");
    return std::max(logistic(w[u] - w[v]), std::numeric_limits<double>::denorm_min());
}

double log_pairwise_marginal(const WeightVector& w, Item u, Item v) {
    if (u == v) throw std::invalid_argument("pairwise marginal needs two distinct items");
    if (u >= w.size() || v >= w.size()) throw std::invalid_argument("item out of range");
    const double x = w[u] - w[v];
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Ranking quicksort_sample(const WeightVector& w, RngStream& rng) {
    const std::size_t n = w.size();
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    std::vector<Item> scratch(n);
    std::vector<std::pair<std::size_t, std::size_t>> pending;
    if (n > 1) pending.emplace_back(0, n);

    while (!pending.empty()) {
        const auto [lo, hi] = pending.back();
        pending.pop_back();
        const std::size_t len = hi - lo;
        const std::size_t pivot_at = lo + rng.uniform_index(len);
        const Item pivot = order[pivot_at];
        const double pivot_weight = w[pivot];

        std::size_t left = lo;
        std::size_t right = hi;
        for (std::size_t i = lo; i < hi; ++i) {
            if (i == pivot_at) continue;
            const Item v = order[i];
            if (rng.bernoulli(logistic(w[v] - pivot_weight))) {
                scratch[left++] = v;
            } else {
                scratch[--right] = v;
            }
        }
        scratch[left] = pivot;
        std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
                  scratch.begin() + static_cast<std::ptrdiff_t>(hi),
                  order.begin() + static_cast<std::ptrdiff_t>(lo));

        if (left - lo > 1) pending.emplace_back(lo, left);
        if (hi - (left + 1) > 1) pending.emplace_back(left + 1, hi);
    }
    return Ranking::from_order(order);
}

Ranking plackett_luce_sample(const WeightVector& w, RngStream& rng) {
    const std::size_t n = w.size();
    std::vector<Item> remaining(n);
    std::iota(remaining.begin(), remaining.end(), Item{0});
    std::vector<Item> order;
    order.reserve(n);
    std::vector<double> mass(n);

    while (!remaining.empty()) {
        double top = -std::numeric_limits<double>::infinity();
        for (Item u : remaining) top = std::max(top, w[u]);
        double total = 0.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            mass[i] = std::exp(w[remaining[i]] - top);
            total += mass[i];
        }
        const double target = rng.uniform() * total;
        std::size_t pick = remaining.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            acc += mass[i];
            if (target < acc) {
                pick = i;
                break;
            }
        }
        order.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return Ranking::from_order(order);
}

Ranking plackett_luce_gumbel(const WeightVector& w, RngStream& rng) {
    const std::size_t n = w.size();
    std::vector<double> key(n);
    for (std::size_t u = 0; u < n; ++u) key[u] = w[u] - std::log(-std::log(rng.uniform_open()));
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    std::sort(order.begin(), order.end(), [&key](Item a, Item b) {
        return key[a] > key[b] || (key[a] == key[b] && a < b);
    });
    return Ranking::from_order(order);
}

Ranking sample_ranking(SamplerKind kind, const WeightVector& w, RngStream& rng) {
    switch (kind) {
        case SamplerKind::quicksort: return quicksort_sample(w, rng);
        case SamplerKind::plackett_luce: return plackett_luce_sample(w, rng);
        case SamplerKind::plackett_luce_gumbel: return plackett_luce_gumbel(w, rng);
    }
    throw std::invalid_argument("unknown sampler");
}

}  // namespace onrank
