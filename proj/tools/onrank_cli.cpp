// onrank: run, sweep and verify online ranking experiments.
//
// Exit codes: 0 ok, 1 runtime failure (or failed verification), 2 config
// error, 3 trace validation error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "onrank/environments.hpp"
#include "onrank/harness.hpp"
#include "onrank/verification.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTrace = 3;

struct Overrides {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::string learner;
    std::string sampler;
    std::string setting;
    std::optional<std::size_t> n;
    std::optional<std::size_t> k;
    std::optional<std::int64_t> horizon;
    std::string eta;
    std::optional<std::int64_t> checkpoints;
    std::string adversary;
    std::string trace;
    std::optional<int> threads;
    bool record_rankings = false;
    bool timings = false;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config");
    cmd->add_option("--seed", o.seeds, "seed (repeatable)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--learner", o.learner, "online-rank | fpl | mw-explicit");
    cmd->add_option("--sampler", o.sampler, "quicksort | pl | pl-gumbel");
    cmd->add_option("--setting", o.setting, "single | k-choice | general | spearman");
    cmd->add_option("--n", o.n, "number of items");
    cmd->add_option("--k", o.k, "choice size for k-choice");
    cmd->add_option("--T", o.horizon, "horizon");
    cmd->add_option("--eta", o.eta, "auto or a value in (0, 1]");
    cmd->add_option("--checkpoints", o.checkpoints, "prefix-regret checkpoints per run");
    cmd->add_option("--adversary", o.adversary, "uniform | fixed | trace");
    cmd->add_option("--trace", o.trace, "trace file for the trace adversary");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_flag("--record-rankings", o.record_rankings, "store every emitted ranking");
    cmd->add_flag("--timings", o.timings, "also write wall-clock timings");
}

template <typename Parse>
auto parse_flag(const std::string& text, const char* flag, Parse parse) {
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        throw onrank::ConfigError(std::string(flag) + ": " + e.what());
    }
}

onrank::ExperimentConfig resolve(const Overrides& o) {
    using namespace onrank;
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config_path);
    if (!o.setting.empty()) c.setting.kind = parse_flag(o.setting, "--setting", parse_setting_kind);
    if (o.n) c.n = *o.n;
    if (o.k) c.setting.k = *o.k;
    if (o.horizon) c.horizon = *o.horizon;
    if (!o.learner.empty()) c.learner.kind = parse_flag(o.learner, "--learner", parse_learner_kind);
    if (!o.sampler.empty()) c.learner.sampler = parse_flag(o.sampler, "--sampler", parse_sampler_kind);
    if (!o.eta.empty()) {
        if (o.eta == "auto") {
            c.learner.eta.reset();
        } else {
            try {
                std::size_t used = 0;
                c.learner.eta = std::stod(o.eta, &used);
                if (used != o.eta.size()) throw std::invalid_argument(o.eta);
            } catch (const std::exception&) {
                throw ConfigError("--eta must be 'auto' or a number");
            }
        }
    }
    if (o.checkpoints) c.checkpoints = *o.checkpoints;
    if (!o.adversary.empty()) c.adversary = parse_flag(o.adversary, "--adversary", parse_adversary_kind);
    if (!o.trace.empty()) {
        c.trace_path = o.trace;
        if (o.adversary.empty()) c.adversary = AdversaryKind::trace;
    }
    if (!o.seeds.empty()) c.seeds = o.seeds;
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.threads) c.threads = *o.threads;
    if (o.record_rankings) c.record_rankings = true;
    if (o.timings) c.record_timings = true;
    c.validate();
    return c;
}

int print_report(const onrank::VerificationReport& report) {
    for (const auto& check : report.checks) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.id << " " << check.title << " ["
                  << check.seconds << " s]\n     " << check.detail << "\n";
    }
    std::cout << (report.passed() ? "suite '" + report.suite + "' passed\n" : "suite '" + report.suite + "' FAILED\n");
    return report.passed() ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online ranking with discrete-choice feedback: experiments and verification"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run_cmd = app.add_subcommand("run", "play a learner against an adversary for every seed");
    add_experiment_flags(run_cmd, run_opts);

    Overrides sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of runs over the config's sweep axes");
    add_experiment_flags(sweep_cmd, sweep_opts);

    std::string suite = "all";
    auto* verify_cmd = app.add_subcommand("verify", "run an acceptance suite");
    verify_cmd->add_option("suite", suite, "marginals | offsets | hindsight | regret-bound | scaling | spearman | "
                                           "determinism | all");

    Overrides trace_opts;
    std::string trace_out;
    auto* trace_cmd = app.add_subcommand("gen-trace", "write an adversary's feedback sequence to a trace file");
    add_experiment_flags(trace_cmd, trace_opts);
    trace_cmd->get_option("--out")->description("trace file to write (- for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) {
            const auto config = resolve(run_opts);
            const auto results = onrank::run(config);
            onrank::write_run_outputs(config, results, config.out_dir);
            const auto summary = onrank::run_summary(config, results);
            std::cout << "regret mean " << summary["regret"]["mean"] << " (se " << summary["regret"]["std_error"]
                      << ") over " << results.size() << " seed(s); bound " << summary["bounds"]["upper"]
                      << "; results in " << config.out_dir.string() << "\n";
        } else if (*sweep_cmd) {
            const auto config = resolve(sweep_opts);
            const auto rows = onrank::sweep(config);
            onrank::write_sweep_outputs(config, rows, config.out_dir);
            std::cout << rows.size() << " cells written to " << (config.out_dir / "sweep.csv").string() << "\n";
        } else if (*verify_cmd) {
            return print_report(onrank::verify(suite));
        } else if (*trace_cmd) {
            const auto config = resolve(trace_opts);
            const auto seq = onrank::make_sequence(config, config.seeds.front());
            if (trace_opts.out.empty() || trace_opts.out == "-") {
                onrank::write_trace(std::cout, seq);
            } else {
                onrank::save_trace(trace_opts.out, seq);
            }
        }
    } catch (const onrank::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const onrank::TraceError& e) {
        std::cerr << "trace error: " << e.what() << "\n";
        return kExitTrace;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
