#include "onrank/environments.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace onrank {

namespace {

void require_horizon(std::int64_t horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
}

std::string describe(const char* generator, std::size_t n, std::int64_t horizon, const RngStream& rng) {
    std::ostringstream out;
    out << generator << "(n=" << n << ",T=" << horizon << ",seed=" << rng.seed()
        << ",stream=" << rng.stream() << ")";
    return out.str();
}

// Draws k distinct items; the first k entries of a partially shuffled 0..n-1.
std::vector<Item> draw_subset(std::size_t n, std::size_t k, RngStream& rng, std::vector<Item>& pool) {
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), Item{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.uniform_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace

void FeedbackSequence::validate() const {
    setting.validate(n);
    for (std::size_t t = 0; t < steps.size(); ++t) {
        if (auto why = setting.violation(steps[t], n)) {
            throw std::invalid_argument("step " + std::to_string(t + 1) + ": " + *why);
        }
    }
}

FeedbackSequence uniform_single_choice(std::size_t n, std::int64_t horizon, RngStream& rng) {
    Setting::single().validate(n);
    require_horizon(horizon);
    FeedbackSequence seq{Setting::single(), n, {}, describe("uniform-single", n, horizon, rng)};
    seq.steps.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 0; t < horizon; ++t) {
        seq.steps.push_back(Feedback::single_choice(n, rng.uniform_index(n)));
    }
    return seq;
}

FeedbackSequence uniform_k_choice(std::size_t n, std::size_t k, std::int64_t horizon, RngStream& rng) {
    const auto setting = Setting::k_choice(k);
    setting.validate(n);
    require_horizon(horizon);
    FeedbackSequence seq{setting, n, {}, describe("uniform-k-choice", n, horizon, rng)};
    seq.steps.reserve(static_cast<std::size_t>(horizon));
    std::vector<Item> pool;
    for (std::int64_t t = 0; t < horizon; ++t) {
        const auto chosen = draw_subset(n, k, rng, pool);
        seq.steps.push_back(Feedback::k_choice(n, k, chosen));
    }
    return seq;
}

FeedbackSequence uniform_general(std::size_t n, std::int64_t horizon, RngStream& rng) {
    Setting::general().validate(n);
    require_horizon(horizon);
    FeedbackSequence seq{Setting::general(), n, {}, describe("uniform-general", n, horizon, rng)};
    seq.steps.reserve(static_cast<std::size_t>(horizon));
    std::vector<Item> chosen;
    for (std::int64_t t = 0; t < horizon; ++t) {
        chosen.clear();
        for (std::size_t u = 0; u < n; ++u) {
            if (rng.uniform_index(2) == 1) chosen.push_back(u);
        }
        seq.steps.push_back(Feedback::general(n, chosen));
    }
    return seq;
}

Ranking random_ranking(std::size_t n, RngStream& rng) {
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    return Ranking::from_order(order);
}

FeedbackSequence spearman_sequence(std::size_t n, std::int64_t horizon, const SpearmanSource& source,
                                   RngStream& rng) {
    Setting::spearman().validate(n);
    if (source.mode == SpearmanMode::trace) {
        return load_trace(source.trace_path, Setting::spearman(), n);
    }
    require_horizon(horizon);
    FeedbackSequence seq{Setting::spearman(), n, {}, {}};
    seq.steps.reserve(static_cast<std::size_t>(horizon));
    if (source.mode == SpearmanMode::fixed) {
        if (!source.fixed || source.fixed->size() != n) {
            throw std::invalid_argument("fixed spearman mode needs a permutation of n items");
        }
        seq.provenance = describe("spearman-fixed", n, horizon, rng);
        const auto s = Feedback::spearman(*source.fixed);
        seq.steps.assign(static_cast<std::size_t>(horizon), s);
        return seq;
    }
    seq.provenance = describe("spearman-uniform", n, horizon, rng);
    for (std::int64_t t = 0; t < horizon; ++t) {
        seq.steps.push_back(Feedback::spearman(random_ranking(n, rng)));
    }
    return seq;
}

TraceError::TraceError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? source + ": " + message
                                   : source + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

FeedbackSequence parse_trace(std::istream& in, const Setting& setting, std::size_t n,
                             const std::string& source_name) {
    try {
        setting.validate(n);
    } catch (const std::invalid_argument& e) {
        throw TraceError(source_name, 0, e.what());
    }
    FeedbackSequence seq{setting, n, {}, "trace:" + source_name};
    std::string line;
    std::size_t line_no = 0;
    std::vector<Item> items;
    std::vector<bool> seen(n);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        items.clear();
        std::fill(seen.begin(), seen.end(), false);
        std::istringstream fields(line);
        std::string token;
        bool empty_marker = false;
        while (fields >> token) {
            if (token == "-" && setting.kind == SettingKind::general) {
                empty_marker = true;
                continue;
            }
            std::size_t value = 0;
            const auto* end = token.data() + token.size();
            const auto [ptr, ec] = std::from_chars(token.data(), end, value);
            if (ec != std::errc() || ptr != end) {
                throw TraceError(source_name, line_no, "'" + token + "' is not an item index");
            }
            if (value >= n) {
                throw TraceError(source_name, line_no,
                                 "item " + token + " out of range for n=" + std::to_string(n));
            }
            if (seen[value]) throw TraceError(source_name, line_no, "item " + token + " listed twice");
            seen[value] = true;
            items.push_back(value);
        }
        if (empty_marker && !items.empty()) {
            throw TraceError(source_name, line_no, "'-' marks an empty set and cannot be combined with items");
        }

        switch (setting.kind) {
            case SettingKind::single:
                if (items.size() != 1) {
                    throw TraceError(source_name, line_no,
                                     "single choice needs exactly one item, got " + std::to_string(items.size()));
                }
                seq.steps.push_back(Feedback::single_choice(n, items[0]));
                break;
            case SettingKind::k_choice:
                if (items.empty() || items.size() > setting.k) {
                    throw TraceError(source_name, line_no,
                                     "k-choice needs 1 to " + std::to_string(setting.k) + " items, got " +
                                         std::to_string(items.size()));
                }
                seq.steps.push_back(Feedback::k_choice(n, setting.k, items));
                break;
            case SettingKind::general:
                seq.steps.push_back(Feedback::general(n, items));
                break;
            case SettingKind::spearman:
                if (items.size() != n) {
                    throw TraceError(source_name, line_no,
                                     "spearman line must list all " + std::to_string(n) + " items");
                }
                seq.steps.push_back(Feedback::spearman(Ranking::from_order(items)));
                break;
        }
    }
    return seq;
}

FeedbackSequence load_trace(const std::filesystem::path& path, const Setting& setting, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw TraceError(path.string(), 0, "cannot open trace file");
    return parse_trace(in, setting, n, path.string());
}

void write_trace(std::ostream& out, const FeedbackSequence& seq) {
    out << "# setting=" << to_string(seq.setting.kind);
    if (seq.setting.kind == SettingKind::k_choice) out << " k=" << seq.setting.k;
    out << " n=" << seq.n << " T=" << seq.size();
    if (!seq.provenance.empty()) out << " source=" << seq.provenance;
    out << '\n';
    for (const auto& s : seq.steps) {
        if (seq.setting.kind == SettingKind::spearman) {
            // s = -sigma: listing items by decreasing s gives sigma's position order.
            std::vector<Item> order(s.size());
            for (std::size_t u = 0; u < s.size(); ++u) order[static_cast<std::size_t>(-s[u]) - 1] = u;
            for (std::size_t i = 0; i < order.size(); ++i) out << (i ? " " : "") << order[i];
        } else {
            const auto chosen = s.chosen();
            if (chosen.empty()) out << '-';
            for (std::size_t i = 0; i < chosen.size(); ++i) out << (i ? " " : "") << chosen[i];
        }
        out << '\n';
    }
}

void save_trace(const std::filesystem::path& path, const FeedbackSequence& seq) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file " + path.string());
    write_trace(out, seq);
}

}  // namespace onrank
