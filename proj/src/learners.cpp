#include "onrank/learners.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace onrank {

void LearnerConfig::validate() const {
    setting.validate(n);
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("eta must lie in (0, 1], got " + std::to_string(eta));
    }
}

Ranking online_rank_step(const LearnerConfig& config, const OnlineRankState& state, RngStream& rng) {
    if (state.t >= config.horizon) {
        throw std::logic_error("online_rank_step called after the horizon of " +
                               std::to_string(config.horizon) + " rounds");
    }
    if (state.w.size() != config.n) throw std::invalid_argument("state does not match configured n");
    return sample_ranking(config.sampler, state.w, rng);
}

OnlineRankState online_rank_update(const LearnerConfig& config, OnlineRankState state, const Feedback& s) {
    if (auto why = config.setting.violation(s, config.n)) {
        throw std::invalid_argument("feedback violates the " + to_string(config.setting.kind) +
                                    " setting: " + *why);
    }
    if (state.cumulative.size() != config.n) state.cumulative.assign(config.n, 0.0);
    for (std::size_t u = 0; u < config.n; ++u) {
        if (s[u] == 0.0) continue;
        state.cumulative[u] += s[u];
        state.w.set(u, config.eta * state.cumulative[u]);
    }
    ++state.t;
    return state;
}

bool bound_horizon_ok(std::size_t n, std::int64_t horizon, double m) {
    const double nd = static_cast<double>(n);
    return static_cast<double>(horizon) >= nd * nd * std::log(2.0) / m;
}

double eta_for_bound(std::size_t n, std::int64_t horizon, double m) {
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    if (!(m > 0.0)) throw std::invalid_argument("complexity bound M must be positive");
    if (!bound_horizon_ok(n, horizon, m)) {
        std::cerr << "warning: horizon T=" << horizon << " is below n^2 log 2 / M for n=" << n
                  << ", M=" << m << "; the regret guarantee does not apply\n";
    }
    return static_cast<double>(n) * std::sqrt(std::log(2.0)) /
           std::sqrt(static_cast<double>(horizon) * m);
}

double auto_eta(const Setting& setting, std::size_t n, std::int64_t horizon) {
    return std::min(1.0, eta_for_bound(n, horizon, complexity_bound(setting, n)));
}

FplConfig FplConfig::derive(const Setting& setting, std::size_t n, std::int64_t horizon) {
    setting.validate(n);
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const double nd = static_cast<double>(n);
    FplConfig c;
    c.diameter = nd * nd;
    switch (setting.kind) {
        case SettingKind::single:
            c.loss_bound = nd;
            c.feedback_norm = 1.0;
            break;
        case SettingKind::k_choice:
            c.loss_bound = static_cast<double>(setting.k) * nd;
            c.feedback_norm = static_cast<double>(setting.k);
            break;
        case SettingKind::general:
            c.loss_bound = nd * nd;
            c.feedback_norm = nd;
            break;
        case SettingKind::spearman:
            c.loss_bound = nd * nd * nd;
            c.feedback_norm = nd * nd;
            break;
    }
    c.epsilon = std::sqrt(c.diameter / (c.loss_bound * c.feedback_norm * static_cast<double>(horizon)));
    return c;
}

Ranking fpl_step(std::span<const double> cumulative, const FplConfig& config, RngStream& rng) {
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("FPL epsilon must be positive");
    const double scale = config.scale();
    const std::size_t n = cumulative.size();
    std::vector<double> key(n);
    for (std::size_t u = 0; u < n; ++u) {
        if (!std::isfinite(cumulative[u])) throw std::invalid_argument("FPL history must be finite");
        key[u] = cumulative[u] + (scale > 0.0 ? scale * rng.uniform() : 0.0);
    }
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    std::sort(order.begin(), order.end(), [&key](Item a, Item b) {
        return key[a] > key[b] || (key[a] == key[b] && a < b);
    });
    return Ranking::from_order(order);
}

Ranking mw_explicit_step(std::span<const Ranking> rankings, std::span<const double> cumulative_losses,
                         double beta, RngStream& rng) {
    if (rankings.empty() || rankings.size() != cumulative_losses.size()) {
        throw std::invalid_argument("need one cumulative loss per ranking");
    }
    if (rankings.front().size() > kMaxExplicitItems) {
        throw std::invalid_argument("explicit multiplicative weights is limited to n <= " +
                                    std::to_string(kMaxExplicitItems));
    }
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    const double best = *std::min_element(cumulative_losses.begin(), cumulative_losses.end());
    std::vector<double> mass(rankings.size());
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        mass[i] = std::exp(-beta * (cumulative_losses[i] - best));
        total += mass[i];
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (target < acc) return rankings[i];
    }
    // Rounding left target at the very top; the last ranking with mass wins.
    for (std::size_t i = mass.size(); i-- > 0;) {
        if (mass[i] > 0.0) return rankings[i];
    }
    return rankings.back();
}

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::online_rank: return "online-rank";
        case LearnerKind::fpl: return "fpl";
        case LearnerKind::mw_explicit: return "mw-explicit";
    }
    return "?";
}

LearnerKind parse_learner_kind(std::string_view text) {
    if (text == "online-rank") return LearnerKind::online_rank;
    if (text == "fpl") return LearnerKind::fpl;
    if (text == "mw-explicit") return LearnerKind::mw_explicit;
    throw std::invalid_argument("unknown learner '" + std::string(text) + "'");
}

OnlineRankLearner::OnlineRankLearner(LearnerConfig config)
    : config_(std::move(config)), state_(OnlineRankState::initial(config_.n)) {
    config_.validate();
}

FplLearner::FplLearner(std::size_t n, FplConfig config) : config_(config), cumulative_(n, 0.0) {
    if (!(config_.epsilon > 0.0)) throw std::invalid_argument("FPL epsilon must be positive");
}

void FplLearner::observe(const Feedback& s) {
    if (s.size() != cumulative_.size()) throw std::invalid_argument("feedback size mismatch");
    for (std::size_t u = 0; u < cumulative_.size(); ++u) cumulative_[u] += s[u];
}

ExplicitMwLearner::ExplicitMwLearner(std::size_t n, double beta) : beta_(beta) {
    if (n > kMaxExplicitItems) {
        throw std::invalid_argument("explicit multiplicative weights is limited to n <= " +
                                    std::to_string(kMaxExplicitItems));
    }
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    rankings_ = all_rankings(n);
    losses_.assign(rankings_.size(), 0.0);
}

void ExplicitMwLearner::observe(const Feedback& s) {
    for (std::size_t i = 0; i < rankings_.size(); ++i) losses_[i] += pairwise_loss(rankings_[i], s);
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Setting& setting, std::size_t n,
                                      std::int64_t horizon) {
    setting.validate(n);
    switch (spec.kind) {
        case LearnerKind::online_rank: {
            LearnerConfig config{n, horizon, setting, spec.eta.value_or(0.0), spec.sampler};
            if (!spec.eta) config.eta = auto_eta(setting, n, horizon);
            return std::make_unique<OnlineRankLearner>(config);
        }
        case LearnerKind::fpl: {
            FplConfig config = FplConfig::derive(setting, n, horizon);
            if (spec.fpl_diameter) config.diameter = *spec.fpl_diameter;
            if (spec.fpl_loss_bound) config.loss_bound = *spec.fpl_loss_bound;
            if (spec.fpl_feedback_norm) config.feedback_norm = *spec.fpl_feedback_norm;
            config.epsilon = spec.fpl_epsilon.value_or(std::sqrt(
                config.diameter / (config.loss_bound * config.feedback_norm * static_cast<double>(horizon))));
            return std::make_unique<FplLearner>(n, config);
        }
        case LearnerKind::mw_explicit: {
            const double beta = spec.beta.value_or(spec.eta.value_or(auto_eta(setting, n, horizon)));
            return std::make_unique<ExplicitMwLearner>(n, beta);
        }
    }
    throw std::invalid_argument("unknown learner");
}

}  // namespace onrank
