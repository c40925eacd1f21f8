// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Snapshot collection. A Collector reads the kernel source files under
// configurable roots (so tests can point it at fixture trees) and assembles
// one Snapshot per call. Inside a sampling run an unreadable or malformed
// source file degrades to absent metrics plus a warning; collect() itself
// does not throw once construction has validated the configuration.

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resprof/clock.hpp"
#include "resprof/error.hpp"
#include "resprof/metrics.hpp"
#include "resprof/proc_parsers.hpp"

namespace resprof {

namespace fsutil {

/// Whole-file read; nullopt when the file cannot be opened or read.
inline std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + p.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + p.string());
}

} // namespace fsutil

/// Anything that can produce snapshots on demand. The sampler depends on
/// this interface, not on Collector, so tests can substitute a fake.
class SnapshotSource {
public:
    virtual ~SnapshotSource() = default;
    virtual Snapshot collect() = 0;

    /// Non-fatal anomalies seen so far; surfaced in the sampler report.
    virtual std::vector<std::string> source_warnings() const { return {}; }

    /// Processes that vanished mid-read so far.
    virtual std::uint64_t source_skipped_processes() const { return 0; }
};

struct CollectorConfig {
    std::string proc_root = "/proc";
    std::string cgroup_root = "/sys/fs/cgroup";
    VerbositySet verbosity = VerbositySet::all();

    /// Explicit diskstats device allowlist. Unset means: keep whole devices,
    /// drop partitions by the name heuristic.
    std::optional<std::set<std::string, std::less<>>> device_filter;

    /// Count the loopback interface in the network byte totals.
    bool include_loopback = false;

    /// Relative cgroup path under each v1 controller directory naming the
    /// target container's group. Empty targets the controller root, which is
    /// the correct view when running inside the container being profiled.
    std::string cgroup_path;
};

class Collector final : public SnapshotSource {
public:
    /// Validates the configured roots. Throws ConfigError if a required root
    /// is missing or the cgroup root turns out to be a v2 hierarchy.
    Collector(CollectorConfig config, Clock& clock) : config_(std::move(config)), clock_(&clock) {
        namespace fs = std::filesystem;
        if (!config_.verbosity.any())
            throw ConfigError("no collection level enabled: need at least one of host, container, process");
        std::error_code ec;
        if ((config_.verbosity.host || config_.verbosity.process) &&
            !fs::is_directory(config_.proc_root, ec))
            throw ConfigError("proc root is not a directory: " + config_.proc_root);
        if (config_.verbosity.container) {
            if (!fs::is_directory(config_.cgroup_root, ec))
                throw ConfigError("cgroup root is not a directory: " + config_.cgroup_root);
            if (fs::exists(fs::path(config_.cgroup_root) / "cgroup.controllers", ec))
                throw ConfigError("cgroup root '" + config_.cgroup_root +
                                  "' is a cgroup v2 hierarchy; container metrics require v1 controllers "
                                  "(cpuacct, blkio, memory)");
        }
    }

    Snapshot collect() override {
        Snapshot s;
        const std::int64_t t0 = clock_->monotonic_ns();
        s.wall_clock = wall_ns_to_seconds(clock_->wall_epoch_ns());
        s.monotonic_clock = t0;
        if (config_.verbosity.host) {
            s.section_timestamps.host = clock_->monotonic_ns();
            s.host = collect_host();
        }
        if (config_.verbosity.container) {
            s.section_timestamps.container = clock_->monotonic_ns();
            s.container = collect_container();
        }
        if (config_.verbosity.process) {
            s.section_timestamps.process = clock_->monotonic_ns();
            s.processes = collect_processes();
        }
        s.collection_duration = clock_->monotonic_ns() - t0;
        return s;
    }

    /// Distinct warnings accumulated over the collector's lifetime.
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Processes that vanished between enumeration and their stat read.
    std::uint64_t skipped_processes() const { return skipped_processes_; }

    std::vector<std::string> source_warnings() const override { return warnings_; }
    std::uint64_t source_skipped_processes() const override { return skipped_processes_; }

private:
    std::filesystem::path proc_path(std::string_view rel) const {
        return std::filesystem::path(config_.proc_root) / rel;
    }

    std::filesystem::path cgroup_file(std::string_view controller, std::string_view file) const {
        std::filesystem::path p = std::filesystem::path(config_.cgroup_root) / controller;
        if (!config_.cgroup_path.empty()) p /= config_.cgroup_path;
        return p / file;
    }

    void warn(std::string msg) {
        if (seen_warnings_.insert(msg).second) warnings_.push_back(std::move(msg));
    }

    std::optional<std::string> read_or_warn(const std::filesystem::path& p) {
        auto doc = fsutil::read_file(p);
        if (!doc) warn("cannot read " + p.string());
        return doc;
    }

    HostMetrics collect_host() {
        HostMetrics h;
        if (auto doc = read_or_warn(proc_path("stat"))) {
            try {
                CpuStatLine cpu = parse_proc_stat(*doc);
                h.cpu_time_user_mode = cpu.user;
                h.cpu_time_kernel_mode = cpu.system;
                h.cpu_idle_time = cpu.idle;
                h.cpu_time_io_wait = cpu.iowait;
                h.cpu_context_switches = cpu.context_switches;
                h.cpu_nice = cpu.nice;
                h.cpu_steal = cpu.steal;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(proc_path("diskstats"))) {
            try {
                std::uint64_t reads = 0, writes = 0, rtime = 0, wtime = 0;
                for (const auto& d : parse_proc_diskstats(*doc, config_.device_filter)) {
                    reads += d.sectors_read;
                    writes += d.sectors_written;
                    rtime += d.read_time_ms;
                    wtime += d.write_time_ms;
                }
                h.disk_sector_reads = reads;
                h.disk_sector_writes = writes;
                h.disk_read_time_ms = rtime;
                h.disk_write_time_ms = wtime;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(proc_path("net/dev"))) {
            try {
                std::uint64_t rx = 0, tx = 0;
                for (const auto& n : parse_proc_net_dev(*doc, !config_.include_loopback)) {
                    rx += n.bytes_recvd;
                    tx += n.bytes_sent;
                }
                h.network_bytes_recvd = rx;
                h.network_bytes_sent = tx;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(proc_path("meminfo"))) {
            try {
                MemInfo m = parse_proc_meminfo(*doc);
                h.memory_total_kb = m.total_kb;
                h.memory_free_kb = m.free_kb;
                h.memory_buffers_kb = m.buffers_kb;
                h.memory_cached_kb = m.cached_kb;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(proc_path("loadavg"))) {
            try {
                h.load_avg = parse_proc_loadavg(*doc);
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(proc_path("sys/kernel/hostname")))
            h.host_id = std::string(text::trim(*doc));
        return h;
    }

    ContainerMetrics collect_container() {
        ContainerMetrics c;
        if (auto doc = read_or_warn(cgroup_file("cpuacct", "cpuacct.stat"))) {
            try {
                CgroupCpuacctStat cs = parse_cgroup_cpuacct(*doc);
                c.cpu_time_user_mode = cs.user;
                c.cpu_time_kernel_mode = cs.system;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        // blkio.sectors was dropped from newer kernels; its absence is routine
        // and leaves cDiskSectorIO unset.
        auto sectors_doc = fsutil::read_file(cgroup_file("blkio", "blkio.sectors"));
        if (!sectors_doc) warn("blkio.sectors not available; cDiskSectorIO omitted");
        auto service_doc = read_or_warn(cgroup_file("blkio", "blkio.throttle.io_service_bytes"));
        if (sectors_doc || service_doc) {
            CgroupBlkio b = parse_cgroup_blkio(sectors_doc, service_doc ? *service_doc : std::string());
            if (sectors_doc) c.disk_sector_io = b.sectors_total;
            if (service_doc) {
                c.disk_read_bytes = b.read_bytes;
                c.disk_write_bytes = b.write_bytes;
            }
        }
        // /proc/net/dev is per network namespace, so when running inside the
        // profiled container this read reflects the container's interfaces.
        if (auto doc = read_or_warn(proc_path("net/dev"))) {
            try {
                std::uint64_t rx = 0, tx = 0;
                for (const auto& n : parse_proc_net_dev(*doc, !config_.include_loopback)) {
                    rx += n.bytes_recvd;
                    tx += n.bytes_sent;
                }
                c.network_bytes_recvd = rx;
                c.network_bytes_sent = tx;
            } catch (const ParseError& e) {
                warn(e.what());
            }
        }
        if (auto doc = read_or_warn(cgroup_file("memory", "memory.usage_in_bytes"))) {
            auto v = text::to_u64(text::trim(*doc));
            if (v) c.memory_used_bytes = *v;
            else warn("memory.usage_in_bytes: invalid value");
        }
        if (auto doc = read_or_warn(proc_path("self/cgroup")))
            c.container_id = parse_self_cgroup_id(*doc);
        if (auto doc = fsutil::read_file(cgroup_file("cpuacct", "cgroup.procs"))) {
            std::uint64_t n = 0;
            for (std::string_view line : text::split_lines(*doc))
                if (!text::trim(line).empty()) ++n;
            c.num_processes = n;
        } else {
            c.num_processes = static_cast<std::uint64_t>(enumerate_pids().size());
        }
        return c;
    }

    std::vector<ProcessMetrics> collect_processes() {
        std::vector<ProcessMetrics> out;
        for (std::int64_t pid : target_pids()) {
            auto stat_doc = fsutil::read_file(proc_path(std::to_string(pid) + "/stat"));
            if (!stat_doc) {
                ++skipped_processes_; // vanished between enumeration and read
                continue;
            }
            ProcessMetrics p;
            try {
                PidStatRecord rec = parse_pid_stat(*stat_doc);
                p.pid = rec.pid;
                p.name = rec.comm;
                p.cpu_time_user_mode = rec.utime;
                p.cpu_time_kernel_mode = rec.stime;
                p.num_threads = rec.num_threads;
                p.resident_set_pages = rec.rss_pages;
                p.block_io_delays = rec.delayacct_blkio_ticks;
            } catch (const ParseError& e) {
                warn(e.what());
                ++skipped_processes_;
                continue;
            }
            // A process that exits after its stat read keeps its record; the
            // status-derived counters just stay absent.
            if (auto status_doc = fsutil::read_file(proc_path(std::to_string(pid) + "/status"))) {
                try {
                    PidStatusRecord st = parse_pid_status(*status_doc);
                    p.voluntary_ctxt_switches = st.voluntary_ctxt_switches;
                    p.nonvoluntary_ctxt_switches = st.nonvoluntary_ctxt_switches;
                } catch (const ParseError& e) {
                    warn(e.what());
                }
            }
            out.push_back(std::move(p));
        }
        std::sort(out.begin(), out.end(),
                  [](const ProcessMetrics& a, const ProcessMetrics& b) { return a.pid < b.pid; });
        return out;
    }

    /// Pids to sample: the target cgroup's member list when a cgroup path is
    /// configured and readable, otherwise every numeric entry of proc root.
    std::vector<std::int64_t> target_pids() {
        if (!config_.cgroup_path.empty()) {
            if (auto doc = fsutil::read_file(cgroup_file("cpuacct", "cgroup.procs"))) {
                std::vector<std::int64_t> pids;
                for (std::string_view line : text::split_lines(*doc)) {
                    auto v = text::to_u64(text::trim(line));
                    if (v) pids.push_back(static_cast<std::int64_t>(*v));
                }
                std::sort(pids.begin(), pids.end());
                return pids;
            }
            warn("cannot read cgroup.procs for configured cgroup path; falling back to full process scan");
        }
        return enumerate_pids();
    }

    std::vector<std::int64_t> enumerate_pids() {
        namespace fs = std::filesystem;
        std::vector<std::int64_t> pids;
        std::error_code ec;
        fs::directory_iterator it(config_.proc_root, ec);
        if (ec) {
            warn("cannot enumerate " + config_.proc_root + ": " + ec.message());
            return pids;
        }
        for (const auto& entry : it) {
            const std::string name = entry.path().filename().string();
            if (name.empty()) continue;
            bool numeric = true;
            for (char ch : name)
                if (!std::isdigit(static_cast<unsigned char>(ch))) { numeric = false; break; }
            if (!numeric) continue;
            if (auto v = text::to_u64(name)) pids.push_back(static_cast<std::int64_t>(*v));
        }
        std::sort(pids.begin(), pids.end());
        return pids;
    }

    CollectorConfig config_;
    Clock* clock_;
    std::vector<std::string> warnings_;
    std::set<std::string> seen_warnings_;
    std::uint64_t skipped_processes_ = 0;
};

} // namespace resprof
