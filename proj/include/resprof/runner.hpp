// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Workload execution. A workload is either a plain command or a command
// wrapped in a container runtime invocation; either way it runs as a child
// process while the sampler thread takes snapshots, and its wall time and
// exit status land in run_result.json inside the run directory.

#pragma once

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "resprof/clock.hpp"
#include "resprof/collector.hpp"
#include "resprof/error.hpp"
#include "resprof/sampler.hpp"
#include "resprof/snapshot_json.hpp"

namespace resprof {

struct WorkloadSpec {
    std::vector<std::string> command; // argv of the workload itself

    /// When set, the command is wrapped in "<runtime> run --rm ... <image>".
    std::string container_image;

    /// Bind mount in "host:container" form, forwarded as -v. Empty = none.
    std::string data_mount;

    /// Environment passed to the workload (as -e pairs when containerized,
    /// via the child environment otherwise). Map order keeps argv stable.
    std::map<std::string, std::string> environment;

    std::string runtime = "docker";
};

/// Exit status and timing of one executed workload.
struct RunResult {
    std::vector<std::string> command; // the argv actually executed
    int exit_code = 0;                // -1 when terminated by a signal
    std::optional<int> term_signal;
    double wall_seconds = 0.0;
    double start_wall_clock = 0.0; // epoch seconds

    bool operator==(const RunResult&) const = default;
};

/// Expand a workload spec into the argv to execute. Containerized workloads
/// become a runtime invocation; plain ones pass through untouched.
inline std::vector<std::string> build_runtime_invocation(const WorkloadSpec& spec) {
    if (spec.command.empty()) throw ConfigError("workload command is empty");
    if (spec.container_image.empty()) return spec.command;
    std::vector<std::string> argv{spec.runtime, "run", "--rm"};
    for (const auto& [key, value] : spec.environment) {
        argv.push_back("-e");
        argv.push_back(key + "=" + value);
    }
    if (!spec.data_mount.empty()) {
        argv.push_back("-v");
        argv.push_back(spec.data_mount);
    }
    argv.push_back(spec.container_image);
    argv.insert(argv.end(), spec.command.begin(), spec.command.end());
    return argv;
}

inline std::string join_command(const std::vector<std::string>& argv) {
    std::string out;
    for (const auto& a : argv) {
        if (!out.empty()) out += ' ';
        out += a;
    }
    return out;
}

inline ordered_json to_json(const RunResult& r) {
    ordered_json j = ordered_json::object();
    j["command"] = r.command;
    j["exitCode"] = r.exit_code;
    if (r.term_signal) j["termSignal"] = *r.term_signal;
    j["wallSeconds"] = r.wall_seconds;
    j["startWallClock"] = r.start_wall_clock;
    return j;
}

inline std::string serialize_run_result(const RunResult& r) {
    return to_json(r).dump(2) + "\n";
}

inline RunResult parse_run_result(std::string_view doc) {
    ordered_json j = ordered_json::parse(doc, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("malformed run result document");
    using namespace jsondetail;
    RunResult r;
    const ordered_json& cmd = require(j, "command", "run result");
    if (!cmd.is_array()) throw ParseError("malformed run result: 'command' is not an array");
    for (const auto& a : cmd) r.command.push_back(a.get<std::string>());
    r.exit_code = static_cast<int>(as_i64(require(j, "exitCode", "run result"), "exitCode"));
    if (const ordered_json* v = find(j, "termSignal"))
        r.term_signal = static_cast<int>(as_i64(*v, "termSignal"));
    r.wall_seconds = as_double(require(j, "wallSeconds", "run result"), "wallSeconds");
    r.start_wall_clock = as_double(require(j, "startWallClock", "run result"), "startWallClock");
    return r;
}

/// Fork and exec an argv, wait for it, and time it. Spawn failures (missing
/// binary, exec error) surface as IoError via a close-on-exec pipe carrying
/// the child's errno; they are distinct from the workload failing on its own.
inline RunResult execute_argv(const std::vector<std::string>& argv,
                              const std::map<std::string, std::string>& environment, Clock& clock) {
    if (argv.empty()) throw ConfigError("workload command is empty");
    int err_pipe[2];
    if (pipe(err_pipe) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
    fcntl(err_pipe[0], F_SETFD, FD_CLOEXEC);
    fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

    RunResult result;
    result.command = argv;
    result.start_wall_clock = wall_ns_to_seconds(clock.wall_epoch_ns());
    const std::int64_t start_ns = clock.monotonic_ns();

    pid_t child = fork();
    if (child < 0) {
        close(err_pipe[0]);
        close(err_pipe[1]);
        throw IoError(std::string("fork: ") + std::strerror(errno));
    }
    if (child == 0) {
        close(err_pipe[0]);
        for (const auto& [key, value] : environment) setenv(key.c_str(), value.c_str(), 1);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        const int exec_errno = errno;
        ssize_t ignored = write(err_pipe[1], &exec_errno, sizeof exec_errno);
        (void)ignored;
        _exit(127);
    }

    close(err_pipe[1]);
    int exec_errno = 0;
    const ssize_t n = read(err_pipe[0], &exec_errno, sizeof exec_errno);
    close(err_pipe[0]);

    int status = 0;
    while (waitpid(child, &status, 0) < 0 && errno == EINTR) {}
    result.wall_seconds = static_cast<double>(clock.monotonic_ns() - start_ns) / 1e9;

    if (n > 0)
        throw IoError("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = -1;
        result.term_signal = WTERMSIG(status);
    }
    return result;
}

struct ProfileConfig {
    WorkloadSpec workload;
    SamplerConfig sampler;     // output_dir names the run directory
    CollectorConfig collector; // validated before the workload starts
};

struct ProfileOutcome {
    SamplerReport report;
    RunResult run;
    std::string run_dir;
};

/// Profile one workload run: start the sampling loop on a background thread,
/// execute the workload to completion, then stop the sampler and record
/// run_result.json alongside the snapshots.
inline ProfileOutcome profile_workload(const ProfileConfig& config, Clock& clock) {
    Collector collector(config.collector, clock); // throws ConfigError before anything starts
    SamplerConfig sampler_config = config.sampler;
    sampler_config.metadata.workload_command = join_command(config.workload.command);
    sampler_config.metadata.output_directory = sampler_config.output_dir;
    sampler_config.metadata.start_wall_clock = wall_ns_to_seconds(clock.wall_epoch_ns());
    sampler_config.metadata.interval_seconds = sampler_config.interval_seconds;

    std::atomic<bool> stop{false};
    SamplerReport report;
    std::exception_ptr sampler_error;
    std::thread sampler_thread([&] {
        try {
            report = run_sampler(sampler_config, collector, clock, stop);
        } catch (...) {
            sampler_error = std::current_exception();
        }
    });

    ProfileOutcome outcome;
    outcome.run_dir = sampler_config.output_dir;
    try {
        const auto argv = build_runtime_invocation(config.workload);
        outcome.run = execute_argv(argv, config.workload.environment, clock);
    } catch (...) {
        stop.store(true, std::memory_order_relaxed);
        sampler_thread.join();
        throw;
    }
    stop.store(true, std::memory_order_relaxed);
    sampler_thread.join();
    if (sampler_error) std::rethrow_exception(sampler_error);

    outcome.report = report;
    fsutil::write_file(std::filesystem::path(outcome.run_dir) / "run_result.json",
                       serialize_run_result(outcome.run));
    return outcome;
}

} // namespace resprof
