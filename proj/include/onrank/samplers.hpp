#pragma once

// Noisy sorting procedures: map a weight vector w to a random ranking such
// that, for every pair u != v, Pr[u ahead of v] = e^{w(u)} / (e^{w(u)} + e^{w(v)}).

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onrank/core.hpp"
#include "onrank/rng.hpp"

namespace onrank {

/// Natural-log scale item weights; item u has score e^{w(u)}. All entries
/// are finite.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::size_t n) : w_(n, 0.0) {}
    explicit WeightVector(std::vector<double> w);

    std::size_t size() const { return w_.size(); }
    double operator[](Item u) const { return w_[u]; }
    std::span<const double> values() const { return w_; }

    /// w(u) += delta; throws std::overflow_error if the result is not finite.
    void add(Item u, double delta);
    /// Throws std::invalid_argument for a non-finite value.
    void set(Item u, double value);

private:
    std::vector<double> w_;
};

enum class SamplerKind { quicksort, plackett_luce, plackett_luce_gumbel };

std::string to_string(SamplerKind kind);
/// Accepts "quicksort", "pl", "pl-gumbel".
SamplerKind parse_sampler_kind(std::string_view text);

/// Noisy QuickSort: uniform pivot, every other item goes left with
/// probability e^{w(v)} / (e^{w(v)} + e^{w(p)}). Uses an explicit stack, so
/// heavily skewed partitions cannot exhaust the call stack.
Ranking quicksort_sample(const WeightVector& w, RngStream& rng);

/// Sequential Plackett-Luce: fills positions 1..n, each time drawing from
/// the remaining items with probability proportional to e^{w(u)}. O(n^2).
Ranking plackett_luce_sample(const WeightVector& w, RngStream& rng);

/// Plackett-Luce via Gumbel perturbation: sort w(u) + g(u) decreasing with
/// g(u) i.i.d. standard Gumbel. Ties go to the lower item index. O(n log n).
Ranking plackett_luce_gumbel(const WeightVector& w, RngStream& rng);

Ranking sample_ranking(SamplerKind kind, const WeightVector& w, RngStream& rng);

/// 1 / (1 + e^{-x}) without overflow for any finite x.
double logistic(double x);

/// Pr[u ahead of v] = 1 / (1 + e^{w(v) - w(u)}). The result is clamped below
/// at the smallest positive double so it stays strictly positive even when
/// the exact value underflows.
double pairwise_marginal(const WeightVector& w, Item u, Item v);

/// log Pr[u ahead of v], accurate where pairwise_marginal underflows.
double log_pairwise_marginal(const WeightVector& w, Item u, Item v);

}  // namespace onrank
