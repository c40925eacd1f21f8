// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Post-processing: load a run directory, regroup snapshots onto a target
// interval, turn cumulative counters into per-interval deltas, evaluate
// derived-metric formulas, and export the result as CSV.
//
// Interval regrouping assigns each snapshot to bucket
//     k = ceil((wallClock - wallClock0) / target)
// and keeps the last snapshot of each bucket as the bucket end. A counter
// series reports end(k) - end(previous present bucket), so the deltas
// telescope: their sum equals last raw value minus first raw value exactly.
// Gauges report the bucket-end reading itself, including the base point.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resprof/collector.hpp"
#include "resprof/error.hpp"
#include "resprof/ini.hpp"
#include "resprof/metrics.hpp"
#include "resprof/snapshot_json.hpp"

namespace resprof {

/// A loaded run directory: metadata plus snapshots sorted by monotonic
/// clock. Corrupt snapshot files are skipped with a warning, not fatal.
struct ProfileRun {
    RunMetadata metadata;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
};

inline ProfileRun load_run(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a run directory: " + dir);
    ProfileRun run;
    if (auto doc = fsutil::read_file(fs::path(dir) / "run_metadata.json")) {
        try {
            run.metadata = parse_run_metadata(*doc);
        } catch (const ParseError& e) {
            run.warnings.push_back(std::string("run_metadata.json: ") + e.what());
        }
    } else {
        run.warnings.push_back("run_metadata.json missing; assuming defaults");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "run_metadata.json" || name == "sampler_report.json" || name == "run_result.json")
            continue;
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto doc = fsutil::read_file(f);
        if (!doc) {
            run.warnings.push_back("cannot read " + f.string());
            continue;
        }
        try {
            run.snapshots.push_back(parse_snapshot(*doc, ParseStrictness::lenient));
        } catch (const ParseError& e) {
            run.warnings.push_back(f.filename().string() + ": " + e.what());
        }
    }
    if (run.snapshots.empty()) throw ParseError("run directory has no readable snapshots: " + dir);
    std::stable_sort(run.snapshots.begin(), run.snapshots.end(),
                     [](const Snapshot& a, const Snapshot& b) {
                         return a.monotonic_clock < b.monotonic_clock;
                     });
    return run;
}

// --- delta rules -----------------------------------------------------------

enum class DeltaMethod {
    delta,  // per-interval difference of a cumulative counter
    raw,    // bucket-end reading of a gauge
    derived // arithmetic over previously computed series and constants
};

/// One output series. For delta/raw, source names the snapshot metric
/// (defaulting to the series name); for derived, formula is evaluated per
/// timestamp against earlier series and the run constants.
struct DeltaRule {
    std::string name;
    DeltaMethod method = DeltaMethod::raw;
    std::string source;
    std::string formula;
    std::string category; // plot panel; resolved from the catalog when empty
};

/// Built-in rule set: every numeric catalog metric, counters as deltas and
/// gauges as raw readings, plus two derived conveniences. Process metrics
/// are summed across all processes in a snapshot.
inline std::vector<DeltaRule> default_rules() {
    std::vector<DeltaRule> rules;
    for (const auto& d : catalog()) {
        if (d.category == MetricCategory::metadata) continue; // identity fields, not plottable
        rules.push_back({std::string(d.name),
                         d.kind == MetricKind::counter ? DeltaMethod::delta : DeltaMethod::raw,
                         std::string(d.name),
                         "",
                         std::string(to_string(d.category))});
    }
    rules.push_back({"vBytesWritten", DeltaMethod::derived, "",
                     "vDiskSectorWrites * sectorSizeBytes", "disk"});
    rules.push_back({"vMemoryUsed", DeltaMethod::derived, "", "vMemoryTotal - vMemoryFree", "memory"});
    return rules;
}

/// Load rules from an INI document: one section per output series with
/// method / source / formula / category keys.
inline std::vector<DeltaRule> parse_rules(std::string_view doc) {
    IniDocument ini = parse_ini(doc);
    std::vector<DeltaRule> rules;
    for (const auto& section : ini.sections) {
        DeltaRule r;
        r.name = section.name;
        const std::string* method = section.get("method");
        if (!method) throw ConfigError("rule '" + r.name + "': missing 'method'");
        if (*method == "delta") r.method = DeltaMethod::delta;
        else if (*method == "raw") r.method = DeltaMethod::raw;
        else if (*method == "derived") r.method = DeltaMethod::derived;
        else throw ConfigError("rule '" + r.name + "': unknown method '" + *method + "'");
        if (const std::string* s = section.get("source")) r.source = *s;
        if (r.source.empty()) r.source = r.name;
        if (const std::string* f = section.get("formula")) r.formula = *f;
        if (r.method == DeltaMethod::derived && r.formula.empty())
            throw ConfigError("rule '" + r.name + "': derived method requires a formula");
        if (const std::string* c = section.get("category")) r.category = *c;
        if (r.category.empty()) {
            const MetricDescriptor* d = find_metric(r.name);
            r.category = d ? std::string(to_string(d->category)) : "other";
        }
        rules.push_back(std::move(r));
    }
    if (rules.empty()) throw ConfigError("rule file defines no series");
    return rules;
}

// --- formula mini-language -------------------------------------------------

namespace formula {

/// Expression tree over + - * / with unary minus, numeric literals, and
/// identifiers resolved at evaluation time.
struct Node {
    enum class Kind { number, identifier, add, sub, mul, div, neg };
    Kind kind = Kind::number;
    double number = 0;
    std::string ident;
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;
};

using NodePtr = std::unique_ptr<Node>;

namespace detail {

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    NodePtr parse_expression() {
        NodePtr node = parse_term();
        for (;;) {
            if (eat('+')) {
                auto parent = std::make_unique<Node>();
                parent->kind = Node::Kind::add;
                parent->lhs = std::move(node);
                parent->rhs = parse_term();
                node = std::move(parent);
            } else if (eat('-')) {
                auto parent = std::make_unique<Node>();
                parent->kind = Node::Kind::sub;
                parent->lhs = std::move(node);
                parent->rhs = parse_term();
                node = std::move(parent);
            } else {
                return node;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr node = parse_factor();
        for (;;) {
            if (eat('*')) {
                auto parent = std::make_unique<Node>();
                parent->kind = Node::Kind::mul;
                parent->lhs = std::move(node);
                parent->rhs = parse_factor();
                node = std::move(parent);
            } else if (eat('/')) {
                auto parent = std::make_unique<Node>();
                parent->kind = Node::Kind::div;
                parent->lhs = std::move(node);
                parent->rhs = parse_factor();
                node = std::move(parent);
            } else {
                return node;
            }
        }
    }

    NodePtr parse_factor() {
        skip_ws();
        if (eat('(')) {
            NodePtr inner = parse_expression();
            if (!eat(')')) throw ParseError("formula: missing ')'");
            return inner;
        }
        if (eat('-')) {
            auto node = std::make_unique<Node>();
            node->kind = Node::Kind::neg;
            node->lhs = parse_factor();
            return node;
        }
        const char c = peek();
        if (c >= '0' && c <= '9') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_identifier();
        throw ParseError(std::string("formula: unexpected character '") + (c ? std::string(1, c) : "end") +
                         "'");
    }

    NodePtr parse_number() {
        skip_ws();
        std::size_t start = pos;
        bool saw_dot = false;
        while (pos < src.size() &&
               ((src[pos] >= '0' && src[pos] <= '9') || (src[pos] == '.' && !saw_dot))) {
            if (src[pos] == '.') saw_dot = true;
            ++pos;
        }
        auto v = text::to_double(src.substr(start, pos - start));
        if (!v) throw ParseError("formula: invalid number");
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::number;
        node->number = *v;
        return node;
    }

    NodePtr parse_identifier() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() && ((src[pos] >= 'a' && src[pos] <= 'z') ||
                                    (src[pos] >= 'A' && src[pos] <= 'Z') ||
                                    (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
            ++pos;
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::identifier;
        node->ident = std::string(src.substr(start, pos - start));
        return node;
    }
};

} // namespace detail

inline NodePtr parse(std::string_view src) {
    detail::Parser p{src};
    NodePtr node = p.parse_expression();
    p.skip_ws();
    if (p.pos != src.size())
        throw ParseError("formula: trailing input at '" + std::string(src.substr(p.pos)) + "'");
    return node;
}

inline void collect_identifiers(const Node& node, std::set<std::string>& out) {
    if (node.kind == Node::Kind::identifier) out.insert(node.ident);
    if (node.lhs) collect_identifiers(*node.lhs, out);
    if (node.rhs) collect_identifiers(*node.rhs, out);
}

/// Evaluate with a resolver mapping identifiers to values. Any absent
/// identifier or division by zero makes the whole expression absent.
inline std::optional<double> evaluate(
    const Node& node, const std::function<std::optional<double>(std::string_view)>& resolve) {
    switch (node.kind) {
    case Node::Kind::number: return node.number;
    case Node::Kind::identifier: return resolve(node.ident);
    case Node::Kind::neg: {
        auto v = evaluate(*node.lhs, resolve);
        return v ? std::optional<double>(-*v) : std::nullopt;
    }
    default: {
        auto a = evaluate(*node.lhs, resolve);
        auto b = evaluate(*node.rhs, resolve);
        if (!a || !b) return std::nullopt;
        switch (node.kind) {
        case Node::Kind::add: return *a + *b;
        case Node::Kind::sub: return *a - *b;
        case Node::Kind::mul: return *a * *b;
        case Node::Kind::div: return *b == 0.0 ? std::nullopt : std::optional<double>(*a / *b);
        default: return std::nullopt;
        }
    }
    }
}

} // namespace formula

// --- delta computation -----------------------------------------------------

/// One point of an output series. reset marks a counter interval where the
/// raw value went backwards; the delta is reported as zero in that case.
struct DeltaPoint {
    double wall_clock = 0;
    double value = 0;
    bool reset = false;

    bool operator==(const DeltaPoint&) const = default;
};

struct DeltaSeries {
    std::string name;
    std::string category;
    std::vector<DeltaPoint> points;

    bool operator==(const DeltaSeries&) const = default;
};

struct DeltaResult {
    double target_interval = 0;
    std::vector<DeltaSeries> series;
    std::vector<std::string> warnings;
};

namespace analysisdetail {

/// Indices of the last snapshot in each occupied bucket, in time order.
/// The epsilon keeps a sample that lands exactly on a bucket boundary in
/// the earlier bucket despite floating-point noise.
inline std::vector<std::size_t> bucket_end_indices(const std::vector<Snapshot>& snaps, double target) {
    std::vector<std::size_t> ends;
    const double t0 = snaps.front().wall_clock;
    std::int64_t current_bucket = -1;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const double rel = (snaps[i].wall_clock - t0) / target;
        const auto k = static_cast<std::int64_t>(std::ceil(rel - 1e-9));
        if (k == current_bucket) {
            ends.back() = i; // later snapshot in the same bucket wins
        } else {
            ends.push_back(i);
            current_bucket = k;
        }
    }
    return ends;
}

} // namespace analysisdetail

/// Apply a rule set to a loaded run on the given target interval
/// (0 = keep the run's own sampling interval). Rules are evaluated in
/// order; derived formulas may reference the output of earlier rules.
inline DeltaResult compute_deltas(const ProfileRun& run, const std::vector<DeltaRule>& rules,
                                  double target_interval = 0) {
    DeltaResult out;
    out.target_interval = target_interval > 0 ? target_interval : run.metadata.interval_seconds;
    if (!(out.target_interval > 0)) throw ConfigError("target interval must be positive");
    const auto ends = analysisdetail::bucket_end_indices(run.snapshots, out.target_interval);

    // Per-timestamp lookup for derived formulas, filled as rules complete.
    std::map<std::string, std::map<double, double>, std::less<>> computed;
    auto constant_of = [&](std::string_view name) -> std::optional<double> {
        if (name == "sectorSizeBytes") return static_cast<double>(run.metadata.sector_size_bytes);
        if (name == "clockTicksPerSecond") return static_cast<double>(run.metadata.clock_ticks_per_second);
        if (name == "intervalSeconds") return out.target_interval;
        return std::nullopt;
    };

    for (const auto& rule : rules) {
        DeltaSeries series;
        series.name = rule.name;
        series.category = rule.category;
        if (series.category.empty()) {
            const MetricDescriptor* d = find_metric(rule.name);
            series.category = d ? std::string(to_string(d->category)) : "other";
        }

        if (rule.method == DeltaMethod::raw) {
            for (std::size_t idx : ends) {
                const Snapshot& s = run.snapshots[idx];
                if (auto v = metric_value(s, rule.source))
                    series.points.push_back({s.wall_clock, *v, false});
            }
        } else if (rule.method == DeltaMethod::delta) {
            std::optional<double> prev;
            bool warned_reset = false;
            for (std::size_t idx : ends) {
                const Snapshot& s = run.snapshots[idx];
                auto v = metric_value(s, rule.source);
                if (!v) continue; // metric absent in this snapshot; skip it
                if (prev) {
                    if (*v < *prev) {
                        series.points.push_back({s.wall_clock, 0.0, true});
                        if (!warned_reset) {
                            char buf[64];
                            std::snprintf(buf, sizeof buf, "%.6f", s.wall_clock);
                            out.warnings.push_back("counter reset in " + rule.name + " at " + buf);
                            warned_reset = true;
                        }
                    } else {
                        series.points.push_back({s.wall_clock, *v - *prev, false});
                    }
                }
                prev = v;
            }
        } else {
            formula::NodePtr ast = formula::parse(rule.formula);
            std::set<std::string> idents;
            formula::collect_identifiers(*ast, idents);
            std::set<double> timestamps;
            for (const auto& ident : idents) {
                if (constant_of(ident)) continue;
                auto it = computed.find(ident);
                if (it == computed.end())
                    throw ConfigError("rule '" + rule.name + "': unknown identifier '" + ident +
                                      "' (series must be defined by an earlier rule)");
                for (const auto& [ts, value] : it->second) timestamps.insert(ts);
            }
            for (double ts : timestamps) {
                auto resolve = [&](std::string_view ident) -> std::optional<double> {
                    if (auto c = constant_of(ident)) return c;
                    auto series_it = computed.find(ident);
                    if (series_it == computed.end()) return std::nullopt;
                    auto point_it = series_it->second.find(ts);
                    if (point_it == series_it->second.end()) return std::nullopt;
                    return point_it->second;
                };
                if (auto v = formula::evaluate(*ast, resolve))
                    series.points.push_back({ts, *v, false});
            }
        }

        auto& table = computed[series.name];
        for (const auto& p : series.points) table[p.wall_clock] = p.value;
        out.series.push_back(std::move(series));
    }
    return out;
}

/// Select a subset of series by name, preserving rule order. Unknown names
/// are a ConfigError so typos do not silently produce empty output.
inline DeltaResult select_series(const DeltaResult& all, const std::vector<std::string>& names) {
    DeltaResult out;
    out.target_interval = all.target_interval;
    out.warnings = all.warnings;
    for (const auto& name : names) {
        bool found = false;
        for (const auto& s : all.series)
            if (s.name == name) {
                out.series.push_back(s);
                found = true;
                break;
            }
        if (!found) throw ConfigError("unknown series '" + name + "'");
    }
    return out;
}

namespace analysisdetail {

/// Integral values print without a decimal point so counter CSVs stay
/// byte-stable; everything else uses fixed six-digit precision.
inline std::string format_number(double v) {
    if (std::floor(v) == v && std::abs(v) < 9.007199254740992e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace analysisdetail

/// CSV with one timestamp column and one column per series. Rows are the
/// sorted union of all point timestamps; a series without a value at some
/// timestamp leaves its cell empty.
inline std::string export_csv(const DeltaResult& result) {
    std::set<double> timestamps;
    std::vector<std::map<double, double>> lookups;
    lookups.reserve(result.series.size());
    for (const auto& s : result.series) {
        auto& table = lookups.emplace_back();
        for (const auto& p : s.points) {
            timestamps.insert(p.wall_clock);
            table[p.wall_clock] = p.value;
        }
    }
    std::string out = "timestamp";
    for (const auto& s : result.series) {
        out += ',';
        out += s.name;
    }
    out += '\n';
    for (double ts : timestamps) {
        out += analysisdetail::format_number(ts);
        for (const auto& table : lookups) {
            out += ',';
            auto it = table.find(ts);
            if (it != table.end()) out += analysisdetail::format_number(it->second);
        }
        out += '\n';
    }
    return out;
}

} // namespace resprof
