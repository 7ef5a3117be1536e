// Python bindings for the onrank library. Rankings cross the boundary as
// position lists (1-based) and feedback as score lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "onrank/core.hpp"
#include "onrank/environments.hpp"
#include "onrank/evaluation.hpp"
#include "onrank/harness.hpp"
#include "onrank/learners.hpp"
#include "onrank/samplers.hpp"
#include "onrank/verification.hpp"

namespace py = pybind11;
using namespace onrank;

namespace {

Setting make_setting(const std::string& kind, std::size_t k) {
    Setting s{parse_setting_kind(kind), 1};
    if (s.kind == SettingKind::k_choice) s.k = k;
    return s;
}

std::vector<double> scores_of(const Feedback& s) { return {s.scores().begin(), s.scores().end()}; }

FeedbackSequence sequence_from_scores(const std::vector<std::vector<double>>& steps) {
    if (steps.empty()) throw std::invalid_argument("sequence must not be empty");
    FeedbackSequence seq{Setting::general(), steps.front().size(), {}, "python"};
    for (const auto& s : steps) {
        if (s.size() != seq.n) throw std::invalid_argument("all feedback vectors need the same length");
        seq.steps.push_back(Feedback::real_valued(s));
    }
    return seq;
}

std::vector<std::vector<double>> generate(const std::string& setting, std::size_t n, std::size_t k,
                                          std::int64_t horizon, std::uint64_t seed) {
    ExperimentConfig config;
    config.setting = make_setting(setting, k);
    config.n = n;
    config.horizon = horizon;
    config.validate();
    const auto seq = make_sequence(config, seed);
    std::vector<std::vector<double>> out;
    out.reserve(seq.size());
    for (const auto& s : seq.steps) out.push_back(scores_of(s));
    return out;
}

std::string run_json(const std::string& config_text) {
    auto config = ExperimentConfig::from_json(nlohmann::json::parse(config_text));
    config.validate();
    return run_summary(config, run(config)).dump();
}

std::string sweep_json(const std::string& config_text) {
    auto config = ExperimentConfig::from_json(nlohmann::json::parse(config_text));
    config.validate();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : sweep(config)) {
        rows.push_back({{"n", row.n},
                        {"k", row.k},
                        {"T", row.horizon},
                        {"learner", to_string(row.learner)},
                        {"sampler", to_string(row.sampler)},
                        {"seeds", row.seeds},
                        {"rate", row.rate},
                        {"mean_regret", row.regret.mean},
                        {"std_error", row.regret.std_error},
                        {"upper_bound", row.upper_bound}});
    }
    return rows.dump();
}

}  // namespace

PYBIND11_MODULE(_onrank, m) {
    m.doc() = "Online ranking with discrete-choice feedback";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<TraceError>(m, "TraceError", PyExc_ValueError);

    m.def(
        "position_loss",
        [](const std::vector<int>& positions, const std::vector<double>& s) {
            return position_loss(Ranking::from_positions(positions), Feedback::real_valued(s));
        },
        py::arg("positions"), py::arg("scores"));
    m.def(
        "pairwise_loss",
        [](const std::vector<int>& positions, const std::vector<double>& s) {
            return pairwise_loss(Ranking::from_positions(positions), Feedback::real_valued(s));
        },
        py::arg("positions"), py::arg("scores"));
    m.def(
        "complexity_bound", [](const std::string& setting, std::size_t n, std::size_t k) {
            return complexity_bound(make_setting(setting, k), n);
        },
        py::arg("setting"), py::arg("n"), py::arg("k") = 1);
    m.def(
        "auto_eta",
        [](const std::string& setting, std::size_t n, std::int64_t horizon, std::size_t k) {
            return auto_eta(make_setting(setting, k), n, horizon);
        },
        py::arg("setting"), py::arg("n"), py::arg("T"), py::arg("k") = 1);
    m.def("regret_upper_bound", &regret_upper_bound, py::arg("n"), py::arg("T"), py::arg("M"));
    m.def("pairwise_marginal", [](const std::vector<double>& w, Item u, Item v) {
        return pairwise_marginal(WeightVector(w), u, v);
    }, py::arg("weights"), py::arg("u"), py::arg("v"));

    m.def(
        "sample_rankings",
        [](const std::vector<double>& w, const std::string& sampler, std::size_t count, std::uint64_t seed) {
            const WeightVector weights(w);
            const auto kind = parse_sampler_kind(sampler);
            RngStream rng(seed, 0);
            std::vector<std::vector<int>> out;
            out.reserve(count);
            for (std::size_t i = 0; i < count; ++i) out.push_back(sample_ranking(kind, weights, rng).positions());
            return out;
        },
        "Draws `count` rankings (position lists) from a noisy sort of the weights.", py::arg("weights"),
        py::arg("sampler") = "pl-gumbel", py::arg("count") = 1, py::arg("seed") = 0);

    m.def(
        "hindsight_best",
        [](const std::vector<std::vector<double>>& steps) {
            return hindsight_best(sequence_from_scores(steps)).positions();
        },
        "Positions of the best fixed ranking for a list of feedback vectors.", py::arg("feedback"));
    m.def(
        "total_pairwise_loss",
        [](const std::vector<int>& positions, const std::vector<std::vector<double>>& steps) {
            return total_pairwise_loss(Ranking::from_positions(positions), sequence_from_scores(steps));
        },
        py::arg("positions"), py::arg("feedback"));

    m.def("generate_feedback", &generate,
          "Feedback vectors of the uniform adversary for the setting, seeded as in run().", py::arg("setting"),
          py::arg("n"), py::arg("k") = 1, py::arg("T") = 100, py::arg("seed") = 1);

    m.def("run_json", &run_json, "Runs a JSON experiment config; returns the summary as JSON text.",
          py::arg("config"));
    m.def("sweep_json", &sweep_json, "Runs the sweep of a JSON config; returns the rows as JSON text.",
          py::arg("config"));

    m.def(
        "verify",
        [](const std::string& suite) {
            std::vector<py::dict> out;
            for (const auto& c : onrank::verify(suite).checks) {
                py::dict d;
                d["id"] = c.id;
                d["title"] = c.title;
                d["passed"] = c.passed;
                d["detail"] = c.detail;
                d["seconds"] = c.seconds;
                out.push_back(d);
            }
            return out;
        },
        py::arg("suite"));
}
