// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// The sampling loop. Samples are scheduled on a fixed nominal grid
// (anchor + i * interval) so that one slow collection does not shift every
// later sample; an overrun re-anchors the grid at the current instant and
// is counted in the report. Each snapshot is written to its own file named
// by the wall-clock nanosecond timestamp of the sample.

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "resprof/clock.hpp"
#include "resprof/collector.hpp"
#include "resprof/error.hpp"
#include "resprof/metrics.hpp"
#include "resprof/snapshot_json.hpp"
#include "resprof/stats.hpp"

namespace resprof {

struct SamplerConfig {
    double interval_seconds = 1.0; // must be positive
    std::string output_dir;
    std::uint64_t max_samples = 0;       // 0 = unlimited
    double max_duration_seconds = 0.0;   // 0 = unlimited
    RunMetadata metadata;                // embedded in the first snapshot
};

/// Outcome of one sampling run. Latency covers the collect() call only,
/// not serialization or the file write.
struct SamplerReport {
    std::uint64_t total_samples = 0;
    std::uint64_t overruns = 0;
    std::uint64_t write_failures = 0;
    double elapsed_seconds = 0.0;
    CollectionLatencyStats latency;
    std::uint64_t skipped_processes = 0;
    std::vector<std::string> warnings;

    bool operator==(const SamplerReport&) const = default;
};

inline ordered_json to_json(const CollectionLatencyStats& l) {
    ordered_json j = ordered_json::object();
    j["count"] = l.count;
    j["minNs"] = l.min_ns;
    j["maxNs"] = l.max_ns;
    j["meanNs"] = l.mean_ns;
    j["p50Ns"] = l.p50_ns;
    j["p90Ns"] = l.p90_ns;
    j["p99Ns"] = l.p99_ns;
    j["subSecondFraction"] = l.sub_second_fraction;
    return j;
}

inline ordered_json to_json(const SamplerReport& r) {
    ordered_json j = ordered_json::object();
    j["totalSamples"] = r.total_samples;
    j["overruns"] = r.overruns;
    j["writeFailures"] = r.write_failures;
    j["elapsedSeconds"] = r.elapsed_seconds;
    j["latency"] = to_json(r.latency);
    j["skippedProcesses"] = r.skipped_processes;
    j["warnings"] = r.warnings;
    return j;
}

inline std::string serialize_sampler_report(const SamplerReport& r) {
    return to_json(r).dump(2) + "\n";
}

inline SamplerReport parse_sampler_report(std::string_view doc) {
    ordered_json j = ordered_json::parse(doc, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("malformed sampler report document");
    using namespace jsondetail;
    SamplerReport r;
    r.total_samples = as_u64(require(j, "totalSamples", "sampler report"), "totalSamples");
    r.overruns = as_u64(require(j, "overruns", "sampler report"), "overruns");
    r.write_failures = as_u64(require(j, "writeFailures", "sampler report"), "writeFailures");
    r.elapsed_seconds = as_double(require(j, "elapsedSeconds", "sampler report"), "elapsedSeconds");
    const ordered_json& l = require(j, "latency", "sampler report");
    r.latency.count = as_u64(require(l, "count", "latency"), "count");
    r.latency.min_ns = as_i64(require(l, "minNs", "latency"), "minNs");
    r.latency.max_ns = as_i64(require(l, "maxNs", "latency"), "maxNs");
    r.latency.mean_ns = as_double(require(l, "meanNs", "latency"), "meanNs");
    r.latency.p50_ns = as_i64(require(l, "p50Ns", "latency"), "p50Ns");
    r.latency.p90_ns = as_i64(require(l, "p90Ns", "latency"), "p90Ns");
    r.latency.p99_ns = as_i64(require(l, "p99Ns", "latency"), "p99Ns");
    r.latency.sub_second_fraction = as_double(require(l, "subSecondFraction", "latency"), "subSecondFraction");
    r.skipped_processes = as_u64(require(j, "skippedProcesses", "sampler report"), "skippedProcesses");
    if (const ordered_json* w = find(j, "warnings"); w && w->is_array())
        for (const auto& entry : *w) r.warnings.push_back(entry.get<std::string>());
    return r;
}

namespace samplerdetail {

/// 19-digit zero-padded nanosecond name, unique within the directory.
inline std::filesystem::path snapshot_filename(const std::filesystem::path& dir, std::int64_t wall_ns) {
    char buf[32];
    for (;; ++wall_ns) {
        std::snprintf(buf, sizeof buf, "%019lld.json", static_cast<long long>(wall_ns));
        std::filesystem::path candidate = dir / buf;
        std::error_code ec;
        if (!std::filesystem::exists(candidate, ec)) return candidate;
    }
}

/// Sleep until the target monotonic instant in short slices so a stop
/// request takes effect within ~50 ms.
inline void sleep_until(Clock& clock, std::int64_t target_ns, const std::atomic<bool>& stop) {
    constexpr std::int64_t slice_ns = 50'000'000;
    for (;;) {
        if (stop.load(std::memory_order_relaxed)) return;
        std::int64_t remaining = target_ns - clock.monotonic_ns();
        if (remaining <= 0) return;
        clock.sleep_ns(remaining < slice_ns ? remaining : slice_ns);
    }
}

} // namespace samplerdetail

/// Run the sampling loop until a limit is reached or stop becomes true.
/// Writes run_metadata.json up front, one snapshot file per sample, and
/// sampler_report.json on exit; the report is also returned.
inline SamplerReport run_sampler(const SamplerConfig& config, SnapshotSource& source, Clock& clock,
                                 const std::atomic<bool>& stop) {
    namespace fs = std::filesystem;
    if (!(config.interval_seconds > 0))
        throw ConfigError("sampling interval must be positive");
    if (config.output_dir.empty()) throw ConfigError("output directory not set");
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir))
        throw IoError("cannot create output directory: " + config.output_dir);

    fsutil::write_file(fs::path(config.output_dir) / "run_metadata.json",
                       serialize_run_metadata(config.metadata));

    const auto interval_ns = static_cast<std::int64_t>(config.interval_seconds * 1e9 + 0.5);
    const std::int64_t start_ns = clock.monotonic_ns();
    const auto max_duration_ns = static_cast<std::int64_t>(config.max_duration_seconds * 1e9 + 0.5);

    SamplerReport report;
    std::vector<std::int64_t> latencies;
    std::int64_t anchor_ns = start_ns;
    std::uint64_t i = 0;
    while (!stop.load(std::memory_order_relaxed)) {
        const std::int64_t wall_ns = clock.wall_epoch_ns();
        const std::int64_t before = clock.monotonic_ns();
        Snapshot snap = source.collect();
        if (i == 0) snap.metadata = config.metadata;
        latencies.push_back(clock.monotonic_ns() - before);
        try {
            fsutil::write_file(samplerdetail::snapshot_filename(config.output_dir, wall_ns),
                               serialize_snapshot(snap));
        } catch (const IoError& e) {
            ++report.write_failures;
            report.warnings.push_back(e.what());
        }
        ++report.total_samples;
        ++i;
        if (config.max_samples != 0 && i >= config.max_samples) break;
        if (max_duration_ns != 0 && clock.monotonic_ns() - start_ns >= max_duration_ns) break;
        std::int64_t next_ns = anchor_ns + static_cast<std::int64_t>(i) * interval_ns;
        const std::int64_t now_ns = clock.monotonic_ns();
        if (now_ns > next_ns) {
            // Collection overran the interval. Re-anchor the grid so the
            // next sample fires immediately instead of piling up a backlog.
            ++report.overruns;
            anchor_ns = now_ns - static_cast<std::int64_t>(i) * interval_ns;
            next_ns = now_ns;
        }
        samplerdetail::sleep_until(clock, next_ns, stop);
    }

    report.elapsed_seconds = static_cast<double>(clock.monotonic_ns() - start_ns) / 1e9;
    report.latency = latency_stats(latencies);
    const std::vector<std::string> source_warnings = source.source_warnings();
    report.warnings.insert(report.warnings.end(), source_warnings.begin(), source_warnings.end());
    report.skipped_processes = source.source_skipped_processes();
    fsutil::write_file(fs::path(config.output_dir) / "sampler_report.json",
                       serialize_sampler_report(report));
    return report;
}

/// Timed collect() calls with nothing written anywhere; the raw material
/// for the latency self test.
inline std::vector<std::int64_t> measure_self_latency(SnapshotSource& source, Clock& clock,
                                                      std::size_t iterations) {
    std::vector<std::int64_t> out;
    out.reserve(iterations);
    for (std::size_t i = 0; i < iterations; ++i) {
        const std::int64_t before = clock.monotonic_ns();
        (void)source.collect();
        out.push_back(clock.monotonic_ns() - before);
    }
    return out;
}

} // namespace resprof
