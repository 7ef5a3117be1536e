#pragma once

// Online ranking learners: OnlineRank (cumulative eta-scaled feedback fed to a
// noisy sort), Follow the Perturbed Leader with uniform noise, and explicit
// multiplicative weights over all n! rankings for tiny n.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onrank/core.hpp"
#include "onrank/rng.hpp"
#include "onrank/samplers.hpp"

namespace onrank {

struct LearnerConfig {
    std::size_t n = 2;
    std::int64_t horizon = 1;
    Setting setting;
    double eta = 0.1;
    SamplerKind sampler = SamplerKind::plackett_luce_gumbel;

    /// Throws std::invalid_argument unless eta is in (0, 1], horizon >= 1 and
    /// the setting is valid for n.
    void validate() const;
};

/// w(u) = eta * cumulative(u) after every update. The raw sums are kept so
/// that w is one rounding away from the exact value instead of drifting by
/// one rounding per round.
struct OnlineRankState {
    WeightVector w;
    std::vector<double> cumulative;
    std::int64_t t = 0;  // rounds already played

    static OnlineRankState initial(std::size_t n) { return {WeightVector(n), std::vector<double>(n, 0.0), 0}; }
};

/// The ranking for round state.t + 1, drawn from config.sampler applied to
/// state.w. Does not touch state. Throws std::logic_error once the horizon
/// has been played out.
Ranking online_rank_step(const LearnerConfig& config, const OnlineRankState& state, RngStream& rng);

/// w(u) += eta * s(u), t += 1. Throws std::invalid_argument if s does not
/// conform to config.setting.
OnlineRankState online_rank_update(const LearnerConfig& config, OnlineRankState state, const Feedback& s);

/// n * sqrt(log 2) / sqrt(T * M). Writes a warning to stderr when
/// T < n^2 log 2 / M, where the guarantee no longer applies.
double eta_for_bound(std::size_t n, std::int64_t horizon, double m);
bool bound_horizon_ok(std::size_t n, std::int64_t horizon, double m);

/// eta_for_bound with M = complexity_bound(setting, n), capped at 1.
double auto_eta(const Setting& setting, std::size_t n, std::int64_t horizon);

/// Follow the Perturbed Leader with per-item noise uniform on [0, 1/epsilon].
struct FplConfig {
    double epsilon = 1.0;
    double diameter = 0.0;       // D
    double loss_bound = 0.0;     // R
    double feedback_norm = 0.0;  // A

    /// Unit-constant D, R, A for the setting and epsilon = sqrt(D / (R A T)).
    static FplConfig derive(const Setting& setting, std::size_t n, std::int64_t horizon);

    double scale() const { return 1.0 / epsilon; }
};

/// Sorts cumulative[u] + U[0, 1/epsilon] decreasing, ties to the lower index.
/// epsilon = +infinity gives follow-the-leader with no noise.
Ranking fpl_step(std::span<const double> cumulative, const FplConfig& config, RngStream& rng);

inline constexpr std::size_t kMaxExplicitItems = 8;

/// Samples rankings[i] with probability proportional to
/// exp(-beta * cumulative_losses[i]).
Ranking mw_explicit_step(std::span<const Ranking> rankings, std::span<const double> cumulative_losses,
                         double beta, RngStream& rng);

enum class LearnerKind { online_rank, fpl, mw_explicit };

std::string to_string(LearnerKind kind);
/// Accepts "online-rank", "fpl", "mw-explicit".
LearnerKind parse_learner_kind(std::string_view text);

/// A learner playing a fixed-horizon game: act() then observe() each round.
class Learner {
public:
    virtual ~Learner() = default;
    virtual Ranking act(RngStream& rng) = 0;
    virtual void observe(const Feedback& s) = 0;
    virtual LearnerKind kind() const = 0;
    /// The learning rate actually used (eta, epsilon or beta).
    virtual double rate() const = 0;
};

class OnlineRankLearner final : public Learner {
public:
    explicit OnlineRankLearner(LearnerConfig config);

    Ranking act(RngStream& rng) override { return online_rank_step(config_, state_, rng); }
    void observe(const Feedback& s) override { state_ = online_rank_update(config_, std::move(state_), s); }
    LearnerKind kind() const override { return LearnerKind::online_rank; }
    double rate() const override { return config_.eta; }

    const OnlineRankState& state() const { return state_; }
    const LearnerConfig& config() const { return config_; }

private:
    LearnerConfig config_;
    OnlineRankState state_;
};

class FplLearner final : public Learner {
public:
    FplLearner(std::size_t n, FplConfig config);

    Ranking act(RngStream& rng) override { return fpl_step(cumulative_, config_, rng); }
    void observe(const Feedback& s) override;
    LearnerKind kind() const override { return LearnerKind::fpl; }
    double rate() const override { return config_.epsilon; }

    std::span<const double> cumulative() const { return cumulative_; }

private:
    FplConfig config_;
    std::vector<double> cumulative_;
};

class ExplicitMwLearner final : public Learner {
public:
    ExplicitMwLearner(std::size_t n, double beta);

    Ranking act(RngStream& rng) override { return mw_explicit_step(rankings_, losses_, beta_, rng); }
    void observe(const Feedback& s) override;
    LearnerKind kind() const override { return LearnerKind::mw_explicit; }
    double rate() const override { return beta_; }

    std::span<const Ranking> rankings() const { return rankings_; }
    std::span<const double> cumulative_losses() const { return losses_; }

private:
    double beta_;
    std::vector<Ranking> rankings_;
    std::vector<double> losses_;
};

/// Everything needed to build a learner for one run. Unset rates are derived
/// automatically: eta by auto_eta, FPL via FplConfig::derive, beta = eta.
struct LearnerSpec {
    LearnerKind kind = LearnerKind::online_rank;
    SamplerKind sampler = SamplerKind::plackett_luce_gumbel;
    std::optional<double> eta;
    std::optional<double> fpl_epsilon;
    std::optional<double> fpl_diameter;
    std::optional<double> fpl_loss_bound;
    std::optional<double> fpl_feedback_norm;
    std::optional<double> beta;
};

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Setting& setting, std::size_t n,
                                      std::int64_t horizon);

}  // namespace onrank
