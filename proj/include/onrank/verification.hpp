#pragma once

// Statistical and exhaustive checks of the library's guarantees, grouped
// into named suites. Every check is deterministic: all randomness comes from
// fixed seeds.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace onrank {

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const;
};

/// Pairwise marginals of quicksort and sequential Plackett-Luce match the
/// logistic formula: n=8, 20 weight vectors in [-3, 3], all 28 pairs,
/// 1e5 draws, >= 95% of pair tests within 4 standard errors.
CheckResult check_pairwise_marginals();

/// Gumbel-perturbed sort and sequential Plackett-Luce agree in full
/// distribution: n=4, 5 weight vectors, 1e6 draws each, two-sample
/// chi-square over the 24 rankings with p > 0.001.
CheckResult check_sampler_equivalence();

/// position_loss - pairwise_loss is constant over all rankings (n <= 6,
/// 100 binary and 100 real feedback vectors per n), and the maximum pairwise
/// loss of a binary feedback equals its complexity invariant.
CheckResult check_loss_offsets();

/// hindsight_best attains the brute-force minimum total pairwise loss
/// (n = 3..7, 200 single and 200 k-choice sequences of length 50).
CheckResult check_hindsight_oracle();

/// Mean regret + 2 standard errors of OnlineRank with automatic eta stays
/// below the upper bound: 50 seeds, n=10, T=2000, single and k=3 choice.
CheckResult check_regret_bound_single();
CheckResult check_regret_bound_k_choice();

/// Mean regret ratio between T=8000 and T=2000 in [1.5, 2.7]
/// (n=10, 100 seeds, uniform single choice).
CheckResult check_sqrt_t_scaling();

/// OnlineRank and FPL pay (n-1)/2 per round on average under the uniform
/// single-choice adversary (n=10, T=1e4, 20 seeds, 3 standard errors).
CheckResult check_uniform_step_loss();

/// Per-step time of online_rank_step grows by at most 2.6x per doubling of
/// n from 1e3 to 6.4e4, for the pl-gumbel and quicksort samplers.
CheckResult check_runtime_scaling();

/// Spearman mode: OnlineRank regret in [0, 2 n^3 sqrt(T)] for n=5, T=200;
/// hindsight_best maximizes total Spearman correlation for n <= 6.
CheckResult check_spearman();

/// Two executions of the same sweep and run configs give byte-identical
/// CSV and JSON files. Scratch files go under `scratch`.
CheckResult check_determinism(const std::filesystem::path& scratch);

/// "marginals", "offsets", "hindsight", "regret-bound", "scaling",
/// "spearman", "determinism" and "all".
std::vector<std::string> suite_ids();

/// Throws std::invalid_argument for an unknown suite id.
VerificationReport verify(std::string_view suite);

}  // namespace onrank
