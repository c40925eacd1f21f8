// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. run_cli is the whole program minus main() so the
// test suite can drive every subcommand in process with captured streams.
//
// Exit codes: 0 success, 64 usage/configuration error, 70 runtime failure.
// When the profiled workload itself exits nonzero with status N, the tool
// exits 100 + N (capped at 255) so callers can tell workload failures from
// profiler failures.

#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resprof/analysis.hpp"
#include "resprof/clock.hpp"
#include "resprof/collector.hpp"
#include "resprof/error.hpp"
#include "resprof/plot.hpp"
#include "resprof/runner.hpp"
#include "resprof/sampler.hpp"
#include "resprof/stats.hpp"

namespace resprof {

namespace clidetail {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 64;
inline constexpr int exit_runtime = 70;
inline constexpr int exit_workload_base = 100;

/// Collection roots come from flags when given, then environment, then the
/// live defaults.
inline void apply_roots(CollectorConfig& config, const std::string& proc_flag,
                        const std::string& cgroup_flag) {
    if (!proc_flag.empty()) config.proc_root = proc_flag;
    else if (const char* env = std::getenv("RESPROF_PROC_ROOT"); env && *env) config.proc_root = env;
    if (!cgroup_flag.empty()) config.cgroup_root = cgroup_flag;
    else if (const char* env = std::getenv("RESPROF_CGROUP_ROOT"); env && *env)
        config.cgroup_root = env;
}

inline VerbositySet make_verbosity(bool host, bool container, bool process) {
    VerbositySet v{host, container, process};
    return v.any() ? v : VerbositySet::all();
}

inline std::vector<std::string> split_csv(const std::string& list) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        std::string item(text::trim(std::string_view(list).substr(start, comma - start)));
        if (!item.empty()) out.push_back(std::move(item));
        start = comma + 1;
    }
    return out;
}

inline std::vector<double> read_numbers_file(const std::string& path) {
    auto doc = fsutil::read_file(path);
    if (!doc) throw IoError("cannot read " + path);
    std::vector<double> out;
    for (std::string_view line : text::split_lines(*doc)) {
        std::string_view t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto v = text::to_double(t);
        if (!v) throw ParseError(path + ": invalid number '" + std::string(t) + "'");
        out.push_back(*v);
    }
    return out;
}

inline std::string format_ms(double ns) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", ns / 1e6);
    return buf;
}

inline void write_text_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") out << content;
    else fsutil::write_file(path, content);
}

inline DeltaResult compute_from_args(const std::string& run_dir, const std::string& rules_path,
                                     const std::string& metrics_list, double interval,
                                     ProfileRun* run_out) {
    ProfileRun run = load_run(run_dir);
    std::vector<DeltaRule> rules;
    if (!rules_path.empty()) {
        auto doc = fsutil::read_file(rules_path);
        if (!doc) throw IoError("cannot read " + rules_path);
        rules = parse_rules(*doc);
    } else {
        rules = default_rules();
    }
    DeltaResult result = compute_deltas(run, rules, interval);
    if (!metrics_list.empty()) result = select_series(result, split_csv(metrics_list));
    if (run_out) *run_out = std::move(run);
    return result;
}

} // namespace clidetail

/// Parse argv (without the program name) and execute one subcommand.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace clidetail;
    CLI::App app{"resprof: low-overhead resource utilization profiler"};
    app.require_subcommand(1);

    // shared option storage
    bool flag_host = false, flag_container = false, flag_process = false;
    std::string proc_root_flag, cgroup_root_flag, cgroup_path;
    std::vector<std::string> devices;
    bool include_loopback = false;

    auto add_collection_options = [&](CLI::App* sub) {
        sub->add_flag("-v,--host", flag_host, "collect host/VM level metrics");
        sub->add_flag("-c,--container", flag_container, "collect container (cgroup) level metrics");
        sub->add_flag("-p,--process", flag_process, "collect per-process level metrics");
        sub->add_option("--proc-root", proc_root_flag,
                        "procfs root (default /proc, or RESPROF_PROC_ROOT)");
        sub->add_option("--cgroup-root", cgroup_root_flag,
                        "cgroup v1 root (default /sys/fs/cgroup, or RESPROF_CGROUP_ROOT)");
        sub->add_option("--cgroup-path", cgroup_path,
                        "relative cgroup path of the target container under each controller");
        sub->add_option("--device", devices, "restrict disk stats to this device (repeatable)");
        sub->add_flag("--include-loopback", include_loopback,
                      "count the loopback interface in network totals");
    };

    auto make_collector_config = [&]() {
        CollectorConfig config;
        config.verbosity = make_verbosity(flag_host, flag_container, flag_process);
        apply_roots(config, proc_root_flag, cgroup_root_flag);
        config.cgroup_path = cgroup_path;
        config.include_loopback = include_loopback;
        if (!devices.empty())
            config.device_filter = std::set<std::string, std::less<>>(devices.begin(), devices.end());
        return config;
    };

    // profile
    auto* profile = app.add_subcommand("profile", "sample metrics while running a workload");
    double interval = 1.0;
    std::string output_dir;
    std::uint64_t max_samples = 0;
    double max_duration = 0.0;
    std::string image, mount, runtime = "docker";
    std::vector<std::string> env_pairs;
    add_collection_options(profile);
    profile->add_option("-i,--interval", interval, "sampling interval in seconds")
        ->check(CLI::PositiveNumber);
    profile->add_option("-o,--output", output_dir, "run directory (default resprof-run-<epoch>)");
    profile->add_option("--max-samples", max_samples, "stop after this many snapshots (0 = unlimited)");
    profile->add_option("--max-duration", max_duration, "stop after this many seconds (0 = unlimited)");
    profile->add_option("--image", image, "run the workload inside this container image");
    profile->add_option("--mount", mount, "bind mount, host:container (with --image)");
    profile->add_option("--env", env_pairs, "KEY=VALUE for the workload environment (repeatable)");
    profile->add_option("--runtime", runtime, "container runtime command (default docker)");
    std::vector<std::string> workload_args;
    profile->add_option("workload", workload_args, "workload command; put -- before it")
        ->expected(-1);

    // snapshot
    auto* snapshot_cmd = app.add_subcommand("snapshot", "take one snapshot and print it");
    std::string snapshot_output;
    add_collection_options(snapshot_cmd);
    snapshot_cmd->add_option("-o,--output", snapshot_output, "write to file instead of stdout");

    // selftest-latency
    auto* selftest = app.add_subcommand("selftest-latency", "measure collection latency in place");
    std::size_t iterations = 100;
    bool selftest_json = false;
    add_collection_options(selftest);
    selftest->add_option("-n,--iterations", iterations, "number of timed collections")
        ->check(CLI::PositiveNumber);
    selftest->add_flag("--json", selftest_json, "machine readable output");

    // deltas
    auto* deltas_cmd = app.add_subcommand("deltas", "compute per-interval deltas as CSV");
    std::string run_dir, rules_path, metrics_list, deltas_output;
    double target_interval = 0.0;
    deltas_cmd->add_option("run_dir", run_dir, "run directory to analyze")->required();
    deltas_cmd->add_option("-i,--interval", target_interval,
                           "regroup onto this interval in seconds (default: the run's own)");
    deltas_cmd->add_option("--rules", rules_path, "delta rules INI file (default: built-in rules)");
    deltas_cmd->add_option("-m,--metrics", metrics_list, "comma separated series subset");
    deltas_cmd->add_option("-o,--output", deltas_output, "write CSV here instead of stdout");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render delta series as SVG");
    std::string plot_run_dir, plot_rules, plot_metrics, plot_output, style_path, plot_title;
    double plot_interval = 0.0;
    plot_cmd->add_option("run_dir", plot_run_dir, "run directory to plot")->required();
    plot_cmd->add_option("-i,--interval", plot_interval, "regroup onto this interval in seconds");
    plot_cmd->add_option("--rules", plot_rules, "delta rules INI file");
    plot_cmd->add_option("-m,--metrics", plot_metrics, "comma separated series subset");
    plot_cmd->add_option("--style", style_path, "graph style INI file");
    plot_cmd->add_option("--title", plot_title, "plot title");
    plot_cmd->add_option("-o,--output", plot_output, "output SVG path (default <run_dir>/plot.svg)");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "summarize a run's sampler statistics");
    std::string stats_run_dir;
    stats_cmd->add_option("run_dir", stats_run_dir, "run directory")->required();

    // overhead
    auto* overhead_cmd = app.add_subcommand("overhead", "compare baseline and profiled run times");
    std::vector<double> baseline_values, profiled_values;
    std::string baseline_file, profiled_file;
    overhead_cmd->add_option("--baseline", baseline_values, "baseline run time in seconds (repeatable)");
    overhead_cmd->add_option("--profiled", profiled_values, "profiled run time in seconds (repeatable)");
    overhead_cmd->add_option("--baseline-file", baseline_file, "file with one baseline time per line");
    overhead_cmd->add_option("--profiled-file", profiled_file, "file with one profiled time per line");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("resprof");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    SystemClock clock;
    try {
        if (profile->parsed()) {
            std::vector<std::string> workload = workload_args;
            if (!workload.empty() && workload.front() == "--")
                workload.erase(workload.begin());
            if (workload.empty()) {
                err << "error: no workload command given\n";
                return exit_usage;
            }
            ProfileConfig config;
            config.workload.command = workload;
            config.workload.container_image = image;
            config.workload.data_mount = mount;
            config.workload.runtime = runtime;
            for (const auto& pair : env_pairs) {
                std::size_t eq = pair.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("--env expects KEY=VALUE, got '" + pair + "'");
                config.workload.environment[pair.substr(0, eq)] = pair.substr(eq + 1);
            }
            config.collector = make_collector_config();
            config.sampler.interval_seconds = interval;
            config.sampler.max_samples = max_samples;
            config.sampler.max_duration_seconds = max_duration;
            if (output_dir.empty())
                output_dir = "resprof-run-" +
                             std::to_string(clock.wall_epoch_ns() / 1'000'000'000);
            config.sampler.output_dir = output_dir;
            config.sampler.metadata.interval_seconds = interval;
            config.sampler.metadata.verbosity = config.collector.verbosity;
            config.sampler.metadata.clock_ticks_per_second = sysconf(_SC_CLK_TCK);
            config.sampler.metadata.sector_size_bytes = 512;

            ProfileOutcome outcome = profile_workload(config, clock);
            out << "run directory: " << outcome.run_dir << "\n";
            out << "snapshots: " << outcome.report.total_samples << "\n";
            out << "mean collection latency: " << format_ms(outcome.report.latency.mean_ns)
                << " ms\n";
            out << "workload wall time: " << outcome.run.wall_seconds << " s\n";
            if (outcome.run.term_signal) {
                err << "workload terminated by signal " << *outcome.run.term_signal << "\n";
                return exit_runtime;
            }
            if (outcome.run.exit_code != 0) {
                err << "workload exited with status " << outcome.run.exit_code << "\n";
                const int mapped = exit_workload_base + outcome.run.exit_code;
                return mapped > 255 ? 255 : mapped;
            }
            return exit_ok;
        }

        if (snapshot_cmd->parsed()) {
            Collector collector(make_collector_config(), clock);
            const std::string doc = serialize_snapshot(collector.collect());
            write_text_output(snapshot_output, doc, out);
            for (const auto& w : collector.warnings()) err << "warning: " << w << "\n";
            return exit_ok;
        }

        if (selftest->parsed()) {
            Collector collector(make_collector_config(), clock);
            const auto samples = measure_self_latency(collector, clock, iterations);
            const CollectionLatencyStats stats = latency_stats(samples);
            if (selftest_json) {
                out << to_json(stats).dump(2) << "\n";
            } else {
                out << "collections: " << stats.count << "\n";
                out << "min:  " << format_ms(static_cast<double>(stats.min_ns)) << " ms\n";
                out << "mean: " << format_ms(stats.mean_ns) << " ms\n";
                out << "p50:  " << format_ms(static_cast<double>(stats.p50_ns)) << " ms\n";
                out << "p90:  " << format_ms(static_cast<double>(stats.p90_ns)) << " ms\n";
                out << "p99:  " << format_ms(static_cast<double>(stats.p99_ns)) << " ms\n";
                out << "max:  " << format_ms(static_cast<double>(stats.max_ns)) << " ms\n";
                out << "sub-second fraction: " << stats.sub_second_fraction * 100.0 << "%\n";
                out << "latency histogram:\n";
                for (const auto& bucket : latency_histogram(samples)) {
                    out << "  [" << format_ms(static_cast<double>(bucket.lower_ns)) << " ms, "
                        << format_ms(static_cast<double>(bucket.upper_ns)) << " ms): " << bucket.count
                        << "\n";
                }
            }
            return exit_ok;
        }

        if (deltas_cmd->parsed()) {
            DeltaResult result =
                compute_from_args(run_dir, rules_path, metrics_list, target_interval, nullptr);
            write_text_output(deltas_output, export_csv(result), out);
            for (const auto& w : result.warnings) err << "warning: " << w << "\n";
            return exit_ok;
        }

        if (plot_cmd->parsed()) {
            DeltaResult result =
                compute_from_args(plot_run_dir, plot_rules, plot_metrics, plot_interval, nullptr);
            PlotStyle style;
            if (!style_path.empty()) {
                auto doc = fsutil::read_file(style_path);
                if (!doc) throw IoError("cannot read " + style_path);
                style = parse_plot_style(*doc);
            }
            if (plot_output.empty())
                plot_output = (std::filesystem::path(plot_run_dir) / "plot.svg").string();
            fsutil::write_file(plot_output, render_svg(result, style, plot_title));
            out << "wrote " << plot_output << "\n";
            return exit_ok;
        }

        if (stats_cmd->parsed()) {
            ProfileRun run = load_run(stats_run_dir);
            out << "snapshots: " << run.snapshots.size() << "\n";
            std::vector<std::int64_t> durations;
            durations.reserve(run.snapshots.size());
            for (const auto& s : run.snapshots) durations.push_back(s.collection_duration);
            const CollectionLatencyStats recomputed = latency_stats(durations);
            out << "collection duration from snapshots:\n";
            out << "  mean: " << format_ms(recomputed.mean_ns) << " ms\n";
            out << "  p90:  " << format_ms(static_cast<double>(recomputed.p90_ns)) << " ms\n";
            out << "  max:  " << format_ms(static_cast<double>(recomputed.max_ns)) << " ms\n";
            out << "  sub-second fraction: " << recomputed.sub_second_fraction * 100.0 << "%\n";
            if (auto doc = fsutil::read_file(std::filesystem::path(stats_run_dir) /
                                            "sampler_report.json")) {
                const SamplerReport report = parse_sampler_report(*doc);
                out << "sampler report:\n";
                out << "  total samples: " << report.total_samples << "\n";
                out << "  overruns: " << report.overruns << "\n";
                out << "  write failures: " << report.write_failures << "\n";
                out << "  elapsed: " << report.elapsed_seconds << " s\n";
                out << "  mean latency: " << format_ms(report.latency.mean_ns) << " ms\n";
                out << "  skipped processes: " << report.skipped_processes << "\n";
                for (const auto& w : report.warnings) out << "  warning: " << w << "\n";
            } else {
                out << "sampler_report.json not present\n";
            }
            for (const auto& w : run.warnings) err << "warning: " << w << "\n";
            return exit_ok;
        }

        if (overhead_cmd->parsed()) {
            std::vector<double> baseline = baseline_values;
            std::vector<double> profiled = profiled_values;
            if (!baseline_file.empty()) {
                auto extra = read_numbers_file(baseline_file);
                baseline.insert(baseline.end(), extra.begin(), extra.end());
            }
            if (!profiled_file.empty()) {
                auto extra = read_numbers_file(profiled_file);
                profiled.insert(profiled.end(), extra.begin(), extra.end());
            }
            const OverheadResult result = compute_overhead(baseline, profiled);
            ordered_json j = ordered_json::object();
            j["baselineMean"] = result.baseline_mean;
            j["baselineStddev"] = result.baseline_stddev;
            j["profiledMean"] = result.profiled_mean;
            j["profiledStddev"] = result.profiled_stddev;
            j["overheadPercent"] = result.overhead_percent;
            out << j.dump(2) << "\n";
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    err << "error: no subcommand\n";
    return exit_usage;
}

} // namespace resprof
