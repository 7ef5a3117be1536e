#pragma once

// Experiment configuration, execution and result files.
//
// Configuration is a JSON document with nested sections:
//
//   {
//     "schema_version": 1,
//     "setting":   {"kind": "single", "n": 10, "k": 1, "T": 2000},
//     "learner":   {"id": "online-rank", "eta": "auto", "sampler": "pl-gumbel",
//                   "fpl": {"epsilon": "auto", "D": null, "R": null, "A": null},
//                   "beta": "auto"},
//     "adversary": {"id": "uniform", "trace": null, "permutation": null},
//     "seeds": [1, 2, 3],
//     "output":    {"dir": "out", "record_rankings": null, "record_timings": false},
//     "checkpoints": 100,
//     "threads": 1,
//     "sweep":     {"n": [10], "k": [1], "T": [500, 2000], "learner": ["online-rank"],
//                   "sampler": ["pl-gumbel"], "seeds": 20}
//   }
//
// Every key is optional; missing keys take the defaults of ExperimentConfig.
// Result files carry schema version kResultSchemaVersion.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "onrank/core.hpp"
#include "onrank/environments.hpp"
#include "onrank/evaluation.hpp"
#include "onrank/learners.hpp"

namespace onrank {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kResultSchemaVersion = 1;
/// Above this many items per-step rankings are not stored unless requested.
inline constexpr std::size_t kRankingStorageLimit = 100;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AdversaryKind { uniform, fixed, trace };

std::string to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(std::string_view text);

struct SweepAxes {
    std::vector<std::size_t> n;
    std::vector<std::size_t> k;
    std::vector<std::int64_t> horizon;
    std::vector<LearnerKind> learner;
    std::vector<SamplerKind> sampler;
    std::vector<std::uint64_t> seeds;
};

struct ExperimentConfig {
    Setting setting = Setting::single();
    std::size_t n = 10;
    std::int64_t horizon = 1000;
    LearnerSpec learner;
    AdversaryKind adversary = AdversaryKind::uniform;
    std::filesystem::path trace_path;
    std::optional<std::vector<Item>> fixed_order;  // spearman "fixed" adversary
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path out_dir = "out";
    std::optional<bool> record_rankings;  // unset: only when n <= kRankingStorageLimit
    bool record_timings = false;
    std::int64_t checkpoints = 100;
    int threads = 1;
    std::optional<SweepAxes> sweep;

    /// Parses a config document; throws ConfigError on unknown schema
    /// versions, unknown ids or ill-typed values.
    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig load(const std::filesystem::path& path);
    /// Snapshot used in result files. Derived rates are not included.
    nlohmann::json to_json() const;

    /// Throws ConfigError when the combination is unusable.
    void validate() const;
    bool stores_rankings() const { return record_rankings.value_or(n <= kRankingStorageLimit); }
};

/// One seed: adversary sequence from RngStream(seed, 0), learner randomness
/// from RngStream(seed, 1).
struct SeedResult {
    RunRecord record;
    FeedbackSequence sequence;
    double seconds_per_step = 0.0;
};

FeedbackSequence make_sequence(const ExperimentConfig& config, std::uint64_t seed);
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed (concurrently when config.threads > 1); results are in
/// seed order regardless of scheduling. Throws ConfigError / TraceError.
std::vector<SeedResult> run(const ExperimentConfig& config);

/// Writes steps.csv, summary.json and (when enabled) rankings.csv and
/// timings.json into dir.
void write_run_outputs(const ExperimentConfig& config, const std::vector<SeedResult>& results,
                       const std::filesystem::path& dir);
nlohmann::json run_summary(const ExperimentConfig& config, const std::vector<SeedResult>& results);

struct SweepRow {
    std::size_t n = 0;
    std::size_t k = 1;
    std::int64_t horizon = 0;
    LearnerKind learner = LearnerKind::online_rank;
    SamplerKind sampler = SamplerKind::plackett_luce_gumbel;
    std::size_t seeds = 0;
    double rate = 0.0;
    MeanEstimate regret;
    double upper_bound = 0.0;
    std::optional<double> lower_bound;
    double seconds_per_step = 0.0;
};

/// Cartesian product over the sweep axes (n, k, T, learner, sampler), one
/// row per cell in that nesting order. Axes left empty take the base
/// config's value.
std::vector<SweepRow> sweep(const ExperimentConfig& config);

/// sweep.csv and sweep.json in dir. The timing column is written only when
/// config.record_timings is set, so default outputs are reproducible byte
/// for byte.
void write_sweep_outputs(const ExperimentConfig& config, const std::vector<SweepRow>& rows,
                         const std::filesystem::path& dir);

/// Reads a summary.json or sweep.json, rejecting unknown schema versions.
nlohmann::json read_result(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_number(double x);

}  // namespace onrank
