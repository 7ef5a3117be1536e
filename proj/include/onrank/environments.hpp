#pragma once

// Oblivious adversaries and trace files.
//
// Trace format: plain text, one round per line, '#' starts a comment line.
//   single / k-choice: whitespace-separated distinct 0-based item indices
//                      (1..k of them).
//   general:           distinct 0-based item indices; a lone '-' is the
//                      empty set.
//   spearman:          a full permutation of 0..n-1 in position order (the
//                      first listed item is ranked first).
// Blank lines are ignored.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "onrank/core.hpp"
#include "onrank/rng.hpp"

namespace onrank {

struct FeedbackSequence {
    Setting setting;
    std::size_t n = 0;
    std::vector<Feedback> steps;
    std::string provenance;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
    const Feedback& operator[](std::size_t t) const { return steps[t]; }

    /// Throws std::invalid_argument naming the first step that does not
    /// conform to setting.
    void validate() const;
};

/// Lower-bound adversary: every round one item chosen uniformly at random.
FeedbackSequence uniform_single_choice(std::size_t n, std::int64_t horizon, RngStream& rng);

/// Every round a uniformly random k-subset (partial Fisher-Yates).
FeedbackSequence uniform_k_choice(std::size_t n, std::size_t k, std::int64_t horizon, RngStream& rng);

/// Every item chosen independently with probability 1/2 each round.
FeedbackSequence uniform_general(std::size_t n, std::int64_t horizon, RngStream& rng);

/// Uniformly random permutation (Fisher-Yates).
Ranking random_ranking(std::size_t n, RngStream& rng);

enum class SpearmanMode { uniform_random, fixed, trace };

struct SpearmanSource {
    SpearmanMode mode = SpearmanMode::uniform_random;
    std::optional<Ranking> fixed;               // for SpearmanMode::fixed
    std::filesystem::path trace_path;           // for SpearmanMode::trace
};

/// Real-valued feedback s_t = -sigma_t. In trace mode horizon is ignored
/// and the sequence is as long as the file.
FeedbackSequence spearman_sequence(std::size_t n, std::int64_t horizon, const SpearmanSource& source,
                                   RngStream& rng);

/// Raised for malformed or non-conforming trace content; carries the
/// 1-based line number (0 when the problem is not tied to a line).
class TraceError : public std::runtime_error {
public:
    TraceError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

FeedbackSequence parse_trace(std::istream& in, const Setting& setting, std::size_t n,
                             const std::string& source_name = "<stream>");
FeedbackSequence load_trace(const std::filesystem::path& path, const Setting& setting, std::size_t n);

void write_trace(std::ostream& out, const FeedbackSequence& seq);
void save_trace(const std::filesystem::path& path, const FeedbackSequence& seq);

}  // namespace onrank
