#include "onrank/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace onrank {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& message) { throw ConfigError(message); }

const json* find(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    const json* s = find(doc, key);
    if (!s) return empty;
    if (!s->is_object()) config_fail(std::string("'") + key + "' must be an object");
    return *s;
}

template <typename T>
T get_as(const json& value, const std::string& where) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        config_fail("'" + where + "' has the wrong type");
    }
}

std::int64_t get_count(const json& value, const std::string& where) {
    if (!value.is_number_integer()) config_fail("'" + where + "' must be an integer");
    return value.get<std::int64_t>();
}

std::size_t get_size(const json& value, const std::string& where) {
    const auto v = get_count(value, where);
    if (v < 0) config_fail("'" + where + "' must be nonnegative");
    return static_cast<std::size_t>(v);
}

// "auto" / null -> nullopt, number -> value.
std::optional<double> get_rate(const json* value, const std::string& where) {
    if (!value) return std::nullopt;
    if (value->is_string()) {
        if (value->get<std::string>() == "auto") return std::nullopt;
        config_fail("'" + where + "' must be \"auto\" or a number");
    }
    if (!value->is_number()) config_fail("'" + where + "' must be \"auto\" or a number");
    return value->get<double>();
}

template <typename Parse>
auto parse_id(const std::string& text, const std::string& where, Parse parse) {
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        config_fail("'" + where + "': " + e.what());
    }
}

std::vector<std::uint64_t> get_seeds(const json& value, const std::string& where) {
    std::vector<std::uint64_t> seeds;
    if (value.is_number_integer()) {
        const auto count = get_count(value, where);
        if (count < 1) config_fail("'" + where + "' must be at least 1");
        for (std::int64_t i = 1; i <= count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
        return seeds;
    }
    if (!value.is_array()) config_fail("'" + where + "' must be a seed count or a list of seeds");
    for (const auto& s : value) {
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
            config_fail("'" + where + "' entries must be nonnegative integers");
        }
        seeds.push_back(s.get<std::uint64_t>());
    }
    return seeds;
}

json rate_json(const std::optional<double>& rate) { return rate ? json(*rate) : json("auto"); }

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string rate_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::online_rank: return "eta";
        case LearnerKind::fpl: return "epsilon";
        case LearnerKind::mw_explicit: return "beta";
    }
    return "rate";
}

template <typename Fn>
void for_each_parallel(std::size_t count, int threads, Fn&& fn) {
    const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string to_string(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::uniform: return "uniform";
        case AdversaryKind::fixed: return "fixed";
        case AdversaryKind::trace: return "trace";
    }
    return "?";
}

AdversaryKind parse_adversary_kind(std::string_view text) {
    if (text == "uniform") return AdversaryKind::uniform;
    if (text == "fixed") return AdversaryKind::fixed;
    if (text == "trace") return AdversaryKind::trace;
    throw std::invalid_argument("unknown adversary '" + std::string(text) + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    if (!doc.is_object()) config_fail("config must be a JSON object");
    if (const json* v = find(doc, "schema_version")) {
        if (!v->is_number_integer() || v->get<int>() != kConfigSchemaVersion) {
            config_fail("unsupported config schema_version " + v->dump());
        }
    }
    ExperimentConfig c;

    const json& setting = section(doc, "setting");
    if (const json* v = find(setting, "kind")) {
        c.setting.kind = parse_id(get_as<std::string>(*v, "setting.kind"), "setting.kind", parse_setting_kind);
    }
    if (const json* v = find(setting, "n")) c.n = get_size(*v, "setting.n");
    if (const json* v = find(setting, "k")) c.setting.k = get_size(*v, "setting.k");
    if (const json* v = find(setting, "T")) c.horizon = get_count(*v, "setting.T");

    const json& learner = section(doc, "learner");
    if (const json* v = find(learner, "id")) {
        c.learner.kind = parse_id(get_as<std::string>(*v, "learner.id"), "learner.id", parse_learner_kind);
    }
    if (const json* v = find(learner, "sampler")) {
        c.learner.sampler =
            parse_id(get_as<std::string>(*v, "learner.sampler"), "learner.sampler", parse_sampler_kind);
    }
    c.learner.eta = get_rate(find(learner, "eta"), "learner.eta");
    c.learner.beta = get_rate(find(learner, "beta"), "learner.beta");
    const json& fpl = section(learner, "fpl");
    c.learner.fpl_epsilon = get_rate(find(fpl, "epsilon"), "learner.fpl.epsilon");
    c.learner.fpl_diameter = get_rate(find(fpl, "D"), "learner.fpl.D");
    c.learner.fpl_loss_bound = get_rate(find(fpl, "R"), "learner.fpl.R");
    c.learner.fpl_feedback_norm = get_rate(find(fpl, "A"), "learner.fpl.A");

    const json& adversary = section(doc, "adversary");
    if (const json* v = find(adversary, "id")) {
        c.adversary = parse_id(get_as<std::string>(*v, "adversary.id"), "adversary.id", parse_adversary_kind);
    }
    if (const json* v = find(adversary, "trace")) c.trace_path = get_as<std::string>(*v, "adversary.trace");
    if (const json* v = find(adversary, "permutation")) {
        c.fixed_order = get_as<std::vector<Item>>(*v, "adversary.permutation");
    }

    if (const json* v = find(doc, "seeds")) c.seeds = get_seeds(*v, "seeds");

    const json& output = section(doc, "output");
    if (const json* v = find(output, "dir")) c.out_dir = get_as<std::string>(*v, "output.dir");
    if (const json* v = find(output, "record_rankings")) {
        c.record_rankings = get_as<bool>(*v, "output.record_rankings");
    }
    if (const json* v = find(output, "record_timings")) {
        c.record_timings = get_as<bool>(*v, "output.record_timings");
    }
    if (const json* v = find(doc, "checkpoints")) c.checkpoints = get_count(*v, "checkpoints");
    if (const json* v = find(doc, "threads")) c.threads = static_cast<int>(get_count(*v, "threads"));

    if (const json* s = find(doc, "sweep")) {
        if (!s->is_object()) config_fail("'sweep' must be an object");
        SweepAxes axes;
        if (const json* v = find(*s, "n")) {
            for (const auto& x : get_as<std::vector<json>>(*v, "sweep.n")) axes.n.push_back(get_size(x, "sweep.n"));
        }
        if (const json* v = find(*s, "k")) {
            for (const auto& x : get_as<std::vector<json>>(*v, "sweep.k")) axes.k.push_back(get_size(x, "sweep.k"));
        }
        if (const json* v = find(*s, "T")) {
            for (const auto& x : get_as<std::vector<json>>(*v, "sweep.T")) {
                axes.horizon.push_back(get_count(x, "sweep.T"));
            }
        }
        if (const json* v = find(*s, "learner")) {
            for (const auto& x : get_as<std::vector<std::string>>(*v, "sweep.learner")) {
                axes.learner.push_back(parse_id(x, "sweep.learner", parse_learner_kind));
            }
        }
        if (const json* v = find(*s, "sampler")) {
            for (const auto& x : get_as<std::vector<std::string>>(*v, "sweep.sampler")) {
                axes.sampler.push_back(parse_id(x, "sweep.sampler", parse_sampler_kind));
            }
        }
        if (const json* v = find(*s, "seeds")) axes.seeds = get_seeds(*v, "sweep.seeds");
        c.sweep = std::move(axes);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        config_fail(path.string() + ": " + e.what());
    }
    return from_json(doc);
}

json ExperimentConfig::to_json() const {
    json doc;
    doc["schema_version"] = kConfigSchemaVersion;
    doc["setting"] = {{"kind", to_string(setting.kind)}, {"n", n}, {"k", setting.k}, {"T", horizon}};
    doc["learner"] = {{"id", to_string(learner.kind)},
                      {"sampler", to_string(learner.sampler)},
                      {"eta", rate_json(learner.eta)},
                      {"beta", rate_json(learner.beta)},
                      {"fpl",
                       {{"epsilon", rate_json(learner.fpl_epsilon)},
                        {"D", optional_json(learner.fpl_diameter)},
                        {"R", optional_json(learner.fpl_loss_bound)},
                        {"A", optional_json(learner.fpl_feedback_norm)}}}};
    doc["adversary"] = {{"id", to_string(adversary)},
                        {"trace", trace_path.empty() ? json(nullptr) : json(trace_path.generic_string())},
                        {"permutation", optional_json(fixed_order)}};
    doc["seeds"] = seeds;
    doc["checkpoints"] = checkpoints;
    doc["output"] = {{"record_rankings", stores_rankings()}, {"record_timings", record_timings}};
    return doc;
}

void ExperimentConfig::validate() const {
    try {
        setting.validate(n);
    } catch (const std::invalid_argument& e) {
        config_fail(std::string("setting: ") + e.what());
    }
    if (horizon < 1) config_fail("T must be at least 1");
    if (seeds.empty()) config_fail("at least one seed is required");
    if (checkpoints < 0) config_fail("checkpoints must be nonnegative");
    if (threads < 1) config_fail("threads must be at least 1");
    if (learner.eta && !(*learner.eta > 0.0 && *learner.eta <= 1.0)) config_fail("eta must lie in (0, 1]");
    if (learner.beta && !(*learner.beta >= 0.0)) config_fail("beta must be nonnegative");
    if (learner.fpl_epsilon && !(*learner.fpl_epsilon > 0.0)) config_fail("FPL epsilon must be positive");
    for (const auto& v : {learner.fpl_diameter, learner.fpl_loss_bound, learner.fpl_feedback_norm}) {
        if (v && !(*v > 0.0)) config_fail("FPL constants D, R, A must be positive");
    }
    if (learner.kind == LearnerKind::mw_explicit && n > kMaxExplicitItems) {
        config_fail("mw-explicit supports at most " + std::to_string(kMaxExplicitItems) + " items");
    }
    switch (adversary) {
        case AdversaryKind::uniform: break;
        case AdversaryKind::fixed:
            if (setting.kind != SettingKind::spearman) config_fail("the fixed adversary is spearman-only");
            if (fixed_order) {
                try {
                    if (fixed_order->size() != n) throw std::invalid_argument("wrong length");
                    (void)Ranking::from_order(*fixed_order);
                } catch (const std::invalid_argument&) {
                    config_fail("adversary.permutation must be a permutation of 0..n-1");
                }
            }
            break;
        case AdversaryKind::trace:
            if (trace_path.empty()) config_fail("the trace adversary needs adversary.trace");
            break;
    }
}

FeedbackSequence make_sequence(const ExperimentConfig& config, std::uint64_t seed) {
    RngStream rng(seed, 0);
    if (config.adversary == AdversaryKind::trace) {
        auto seq = load_trace(config.trace_path, config.setting, config.n);
        if (static_cast<std::int64_t>(seq.size()) < config.horizon) {
            throw TraceError(config.trace_path.string(), 0,
                             "trace has " + std::to_string(seq.size()) + " rounds but T=" +
                                 std::to_string(config.horizon));
        }
        seq.steps.resize(static_cast<std::size_t>(config.horizon));
        return seq;
    }
    switch (config.setting.kind) {
        case SettingKind::single: return uniform_single_choice(config.n, config.horizon, rng);
        case SettingKind::k_choice: return uniform_k_choice(config.n, config.setting.k, config.horizon, rng);
        case SettingKind::general: return uniform_general(config.n, config.horizon, rng);
        case SettingKind::spearman: {
            SpearmanSource source;
            if (config.adversary == AdversaryKind::fixed) {
                source.mode = SpearmanMode::fixed;
                source.fixed = config.fixed_order ? Ranking::from_order(*config.fixed_order)
                                                  : Ranking::identity(config.n);
            }
            return spearman_sequence(config.n, config.horizon, source, rng);
        }
    }
    throw std::logic_error("unhandled setting");
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
    SeedResult result;
    result.sequence = make_sequence(config, seed);
    auto learner = make_learner(config.learner, config.setting, config.n, config.horizon);
    RngStream rng(seed, 1);
    PlayOptions options{config.checkpoints, config.stores_rankings()};
    const auto start = std::chrono::steady_clock::now();
    result.record = play(*learner, result.sequence, rng, options);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.seconds_per_step = elapsed.count() / static_cast<double>(std::max<std::size_t>(result.sequence.size(), 1));
    return result;
}

std::vector<SeedResult> run(const ExperimentConfig& config) {
    config.validate();
    std::vector<SeedResult> results(config.seeds.size());
    for_each_parallel(config.seeds.size(), config.threads,
                      [&](std::size_t i) { results[i] = run_seed(config, config.seeds[i]); });
    return results;
}

json run_summary(const ExperimentConfig& config, const std::vector<SeedResult>& results) {
    json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["generator_version"] = RngStream::kGeneratorVersion;
    doc["config"] = config.to_json();
    const double rate = results.empty() ? 0.0 : results.front().record.rate;
    doc["rate_name"] = rate_name(config.learner.kind);
    doc[rate_name(config.learner.kind)] = rate;

    json runs = json::array();
    std::vector<RunRecord> records;
    for (const auto& r : results) {
        const auto& rec = r.record;
        runs.push_back({{"seed", rec.seed},
                        {"T", r.sequence.size()},
                        {"sequence", r.sequence.provenance},
                        {"cumulative_pairwise_loss", rec.cumulative_pairwise_loss},
                        {"cumulative_position_loss", rec.cumulative_position_loss},
                        {"hindsight_order", rec.hindsight.order()},
                        {"hindsight_pairwise_loss", rec.hindsight_pairwise_loss},
                        {"hindsight_position_loss", rec.hindsight_position_loss},
                        {"regret", rec.regret()},
                        {"mean_zero_indexed_position_loss", rec.mean_zero_indexed_loss(r.sequence)}});
        records.push_back(rec);
    }
    doc["runs"] = std::move(runs);
    if (!records.empty()) {
        const auto report = make_bound_report(records, config.horizon);
        doc["bounds"] = {{"upper", report.upper_bound}, {"lower", optional_json(report.lower_bound)}};
        doc["regret"] = {{"mean", report.regret.mean},
                         {"std_error", report.regret.std_error},
                         {"seeds", report.seeds}};
    }
    return doc;
}

void write_run_outputs(const ExperimentConfig& config, const std::vector<SeedResult>& results,
                       const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const double rate = results.empty() ? 0.0 : results.front().record.rate;

    std::string csv = "# onrank steps schema_version=" + std::to_string(kResultSchemaVersion) +
                      " learner=" + to_string(config.learner.kind) + " " + rate_name(config.learner.kind) +
                      "=" + format_number(rate) + "\n";
    csv += "seed,t,step_pairwise_loss,cum_pairwise_loss,prefix_regret_at_checkpoint\n";
    std::string rankings = "seed,t,order\n";
    for (const auto& r : results) {
        const auto seed = std::to_string(r.record.seed);
        for (const auto& step : r.record.steps) {
            csv += seed + "," + std::to_string(step.t) + "," + format_number(step.pairwise_loss) + "," +
                   format_number(step.cumulative_pairwise_loss) + "," +
                   (step.prefix_regret ? format_number(*step.prefix_regret) : "") + "\n";
            if (step.ranking) {
                rankings += seed + "," + std::to_string(step.t) + ",";
                const auto order = step.ranking->order();
                for (std::size_t i = 0; i < order.size(); ++i) {
                    rankings += (i ? " " : "") + std::to_string(order[i]);
                }
                rankings += "\n";
            }
        }
    }
    write_text(dir / "steps.csv", csv);
    write_text(dir / "summary.json", run_summary(config, results).dump(2) + "\n");
    if (config.stores_rankings()) write_text(dir / "rankings.csv", rankings);
    if (config.record_timings) {
        json timings = json::array();
        for (const auto& r : results) {
            timings.push_back({{"seed", r.record.seed}, {"seconds_per_step", r.seconds_per_step}});
        }
        write_text(dir / "timings.json",
                   json{{"schema_version", kResultSchemaVersion}, {"timings", timings}}.dump(2) + "\n");
    }
}

std::vector<SweepRow> sweep(const ExperimentConfig& config) {
    const SweepAxes axes = config.sweep.value_or(SweepAxes{});
    const auto ns = axes.n.empty() ? std::vector<std::size_t>{config.n} : axes.n;
    const auto ks = axes.k.empty() ? std::vector<std::size_t>{config.setting.k} : axes.k;
    const auto horizons = axes.horizon.empty() ? std::vector<std::int64_t>{config.horizon} : axes.horizon;
    const auto learners = axes.learner.empty() ? std::vector<LearnerKind>{config.learner.kind} : axes.learner;
    const auto samplers = axes.sampler.empty() ? std::vector<SamplerKind>{config.learner.sampler} : axes.sampler;
    const auto seeds = axes.seeds.empty() ? config.seeds : axes.seeds;
    if (config.setting.kind != SettingKind::k_choice && ks.size() > 1) {
        config_fail("the k axis only applies to the k-choice setting");
    }

    std::vector<ExperimentConfig> cells;
    for (auto n : ns) {
        for (auto k : ks) {
            for (auto horizon : horizons) {
                for (auto learner : learners) {
                    for (auto sampler : samplers) {
                        ExperimentConfig cell = config;
                        cell.sweep.reset();
                        cell.n = n;
                        if (cell.setting.kind == SettingKind::k_choice) cell.setting.k = k;
                        cell.horizon = horizon;
                        cell.learner.kind = learner;
                        cell.learner.sampler = sampler;
                        cell.seeds = seeds;
                        cell.record_rankings = false;
                        cell.threads = 1;
                        cell.validate();
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }

    // Flatten (cell, seed) so the thread pool sees every unit of work.
    std::vector<std::vector<SeedResult>> results(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) results[c].resize(seeds.size());
    for_each_parallel(cells.size() * seeds.size(), config.threads, [&](std::size_t i) {
        const auto c = i / seeds.size();
        const auto s = i % seeds.size();
        results[c][s] = run_seed(cells[c], seeds[s]);
    });

    std::vector<SweepRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        std::vector<RunRecord> records;
        double seconds = 0.0;
        for (const auto& r : results[c]) {
            records.push_back(r.record);
            seconds += r.seconds_per_step;
        }
        const auto report = make_bound_report(records, cell.horizon);
        SweepRow row;
        row.n = cell.n;
        row.k = cell.setting.k;
        row.horizon = cell.horizon;
        row.learner = cell.learner.kind;
        row.sampler = cell.learner.sampler;
        row.seeds = seeds.size();
        row.rate = records.front().rate;
        row.regret = report.regret;
        row.upper_bound = report.upper_bound;
        row.lower_bound = report.lower_bound;
        row.seconds_per_step = seconds / static_cast<double>(seeds.size());
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_outputs(const ExperimentConfig& config, const std::vector<SweepRow>& rows,
                         const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string csv = "# onrank sweep schema_version=" + std::to_string(kResultSchemaVersion) + "\n";
    csv += "setting,n,k,T,learner,sampler,seeds,rate,mean_regret,std_error,upper_bound,lower_bound";
    csv += config.record_timings ? ",seconds_per_step\n" : "\n";
    json table = json::array();
    for (const auto& row : rows) {
        csv += to_string(config.setting.kind) + "," + std::to_string(row.n) + "," + std::to_string(row.k) + "," +
               std::to_string(row.horizon) + "," + to_string(row.learner) + "," + to_string(row.sampler) + "," +
               std::to_string(row.seeds) + "," + format_number(row.rate) + "," + format_number(row.regret.mean) +
               "," + format_number(row.regret.std_error) + "," + format_number(row.upper_bound) + "," +
               (row.lower_bound ? format_number(*row.lower_bound) : "");
        csv += config.record_timings ? "," + format_number(row.seconds_per_step) + "\n" : "\n";
        json entry = {{"n", row.n},
                      {"k", row.k},
                      {"T", row.horizon},
                      {"learner", to_string(row.learner)},
                      {"sampler", to_string(row.sampler)},
                      {"seeds", row.seeds},
                      {"rate", row.rate},
                      {"mean_regret", row.regret.mean},
                      {"std_error", row.regret.std_error},
                      {"upper_bound", row.upper_bound},
                      {"lower_bound", optional_json(row.lower_bound)}};
        if (config.record_timings) entry["seconds_per_step"] = row.seconds_per_step;
        table.push_back(std::move(entry));
    }
    json doc{{"schema_version", kResultSchemaVersion},
             {"generator_version", RngStream::kGeneratorVersion},
             {"config", config.to_json()},
             {"rows", std::move(table)}};
    write_text(dir / "sweep.csv", csv);
    write_text(dir / "sweep.json", doc.dump(2) + "\n");
}

json read_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc = json::parse(in);
    const json* v = find(doc, "schema_version");
    if (!v || !v->is_number_integer() || v->get<int>() != kResultSchemaVersion) {
        throw std::runtime_error(path.string() + ": unsupported result schema_version");
    }
    return doc;
}

}  // namespace onrank
