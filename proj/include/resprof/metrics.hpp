// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Data model shared by every other component: the metric catalog, the
// per-sample snapshot record, and run metadata.
//
// Metrics are collected at three levels, and the level is encoded in the
// metric name prefix: host/VM metrics start with "v", container metrics with
// "c", process metrics with "p". Counter metrics are cumulative since
// boot/creation and only meaningful as differences; gauge metrics are
// instantaneous readings.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace resprof {

enum class MetricKind { counter, gauge };

enum class MetricLevel { host, container, process };

// "metadata" covers identity fields (vId, cId, pId, pName) that ride along
// with the numeric metrics but are not themselves plottable quantities.
enum class MetricCategory { cpu, memory, disk, network, metadata };

struct MetricDescriptor {
    std::string_view name;
    MetricLevel level;
    MetricCategory category;
    std::string_view source; // path template, e.g. "/proc/[pid]/stat"
    MetricKind kind;
    std::string_view unit; // clock-ticks | bytes | sectors | pages | count | milliseconds | kilobytes | text
};

inline constexpr char level_prefix(MetricLevel level) {
    switch (level) {
    case MetricLevel::host: return 'v';
    case MetricLevel::container: return 'c';
    case MetricLevel::process: return 'p';
    }
    return '?';
}

inline std::string_view to_string(MetricLevel level) {
    switch (level) {
    case MetricLevel::host: return "host";
    case MetricLevel::container: return "container";
    case MetricLevel::process: return "process";
    }
    return "?";
}

inline std::string_view to_string(MetricCategory c) {
    switch (c) {
    case MetricCategory::cpu: return "cpu";
    case MetricCategory::memory: return "memory";
    case MetricCategory::disk: return "disk";
    case MetricCategory::network: return "network";
    case MetricCategory::metadata: return "metadata";
    }
    return "?";
}

inline std::string_view to_string(MetricKind k) {
    return k == MetricKind::counter ? "counter" : "gauge";
}

/// The full static registry of collectible metrics.
inline const std::vector<MetricDescriptor>& catalog() {
    using L = MetricLevel;
    using C = MetricCategory;
    using K = MetricKind;
    static const std::vector<MetricDescriptor> table = {
        // host / VM level
        {"vCpuTimeUserMode", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vCpuTimeKernelMode", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vCpuIdleTime", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vCpuTimeIOWait", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vCpuContextSwitches", L::host, C::cpu, "/proc/stat", K::counter, "count"},
        {"vCpuNice", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vCpuSteal", L::host, C::cpu, "/proc/stat", K::counter, "clock-ticks"},
        {"vDiskSectorReads", L::host, C::disk, "/proc/diskstats", K::counter, "sectors"},
        {"vDiskSectorWrites", L::host, C::disk, "/proc/diskstats", K::counter, "sectors"},
        {"vDiskReadTime", L::host, C::disk, "/proc/diskstats", K::counter, "milliseconds"},
        {"vDiskWriteTime", L::host, C::disk, "/proc/diskstats", K::counter, "milliseconds"},
        {"vNetworkBytesRecvd", L::host, C::network, "/proc/net/dev", K::counter, "bytes"},
        {"vNetworkBytesSent", L::host, C::network, "/proc/net/dev", K::counter, "bytes"},
        {"vMemoryTotal", L::host, C::memory, "/proc/meminfo", K::gauge, "kilobytes"},
        {"vMemoryFree", L::host, C::memory, "/proc/meminfo", K::gauge, "kilobytes"},
        {"vMemoryBuffers", L::host, C::memory, "/proc/meminfo", K::gauge, "kilobytes"},
        {"vMemoryCached", L::host, C::memory, "/proc/meminfo", K::gauge, "kilobytes"},
        {"vLoadAvg", L::host, C::cpu, "/proc/loadavg", K::gauge, "count"},
        {"vId", L::host, C::metadata, "/proc/sys/kernel/hostname", K::gauge, "text"},
        // container level (cgroup v1)
        {"cCpuTimeUserMode", L::container, C::cpu, "/sys/fs/cgroup/cpuacct/cpuacct.stat", K::counter, "clock-ticks"},
        {"cCpuTimeKernelMode", L::container, C::cpu, "/sys/fs/cgroup/cpuacct/cpuacct.stat", K::counter, "clock-ticks"},
        {"cDiskSectorIO", L::container, C::disk, "/sys/fs/cgroup/blkio/blkio.sectors", K::counter, "sectors"},
        {"cDiskReadBytes", L::container, C::disk, "/sys/fs/cgroup/blkio/blkio.throttle.io_service_bytes", K::counter, "bytes"},
        {"cDiskWriteBytes", L::container, C::disk, "/sys/fs/cgroup/blkio/blkio.throttle.io_service_bytes", K::counter, "bytes"},
        {"cNetworkBytesRecvd", L::container, C::network, "/proc/net/dev", K::counter, "bytes"},
        {"cNetworkBytesSent", L::container, C::network, "/proc/net/dev", K::counter, "bytes"},
        {"cMemoryUsed", L::container, C::memory, "/sys/fs/cgroup/memory/memory.usage_in_bytes", K::gauge, "bytes"},
        {"cId", L::container, C::metadata, "/proc/self/cgroup", K::gauge, "text"},
        {"cNumProcesses", L::container, C::cpu, "/sys/fs/cgroup/cpuacct/cgroup.procs", K::gauge, "count"},
        // process level
        {"pId", L::process, C::metadata, "/proc/[pid]/stat", K::gauge, "count"},
        {"pName", L::process, C::metadata, "/proc/[pid]/stat", K::gauge, "text"},
        {"pCpuTimeUserMode", L::process, C::cpu, "/proc/[pid]/stat", K::counter, "clock-ticks"},
        {"pCpuTimeKernelMode", L::process, C::cpu, "/proc/[pid]/stat", K::counter, "clock-ticks"},
        {"pVoluntaryContextSwitches", L::process, C::cpu, "/proc/[pid]/status", K::counter, "count"},
        {"pNonvoluntaryContextSwitches", L::process, C::cpu, "/proc/[pid]/status", K::counter, "count"},
        {"pBlockIODelays", L::process, C::disk, "/proc/[pid]/stat", K::counter, "clock-ticks"},
        {"pResidentSetSize", L::process, C::memory, "/proc/[pid]/stat", K::gauge, "pages"},
        {"pNumThreads", L::process, C::cpu, "/proc/[pid]/stat", K::gauge, "count"},
    };
    return table;
}

inline const MetricDescriptor* find_metric(std::string_view name) {
    for (const auto& d : catalog())
        if (d.name == name) return &d;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Per-section metric records. Every field is optional: an unreadable source
// file degrades to absent fields plus a collector warning, never a fatal
// error mid-run.
// ---------------------------------------------------------------------------

struct HostMetrics {
    std::optional<std::uint64_t> cpu_time_user_mode;   // vCpuTimeUserMode
    std::optional<std::uint64_t> cpu_time_kernel_mode; // vCpuTimeKernelMode
    std::optional<std::uint64_t> cpu_idle_time;        // vCpuIdleTime
    std::optional<std::uint64_t> cpu_time_io_wait;     // vCpuTimeIOWait
    std::optional<std::uint64_t> cpu_context_switches; // vCpuContextSwitches
    std::optional<std::uint64_t> cpu_nice;             // vCpuNice
    std::optional<std::uint64_t> cpu_steal;            // vCpuSteal
    std::optional<std::uint64_t> disk_sector_reads;    // vDiskSectorReads
    std::optional<std::uint64_t> disk_sector_writes;   // vDiskSectorWrites
    std::optional<std::uint64_t> disk_read_time_ms;    // vDiskReadTime
    std::optional<std::uint64_t> disk_write_time_ms;   // vDiskWriteTime
    std::optional<std::uint64_t> network_bytes_recvd;  // vNetworkBytesRecvd
    std::optional<std::uint64_t> network_bytes_sent;   // vNetworkBytesSent
    std::optional<std::uint64_t> memory_total_kb;      // vMemoryTotal
    std::optional<std::uint64_t> memory_free_kb;       // vMemoryFree
    std::optional<std::uint64_t> memory_buffers_kb;    // vMemoryBuffers
    std::optional<std::uint64_t> memory_cached_kb;     // vMemoryCached
    std::optional<std::array<double, 3>> load_avg;     // vLoadAvg
    std::optional<std::string> host_id;                // vId

    bool operator==(const HostMetrics&) const = default;
};

struct ContainerMetrics {
    std::optional<std::uint64_t> cpu_time_user_mode;   // cCpuTimeUserMode
    std::optional<std::uint64_t> cpu_time_kernel_mode; // cCpuTimeKernelMode
    std::optional<std::uint64_t> disk_sector_io;       // cDiskSectorIO
    std::optional<std::uint64_t> disk_read_bytes;      // cDiskReadBytes
    std::optional<std::uint64_t> disk_write_bytes;     // cDiskWriteBytes
    std::optional<std::uint64_t> network_bytes_recvd;  // cNetworkBytesRecvd
    std::optional<std::uint64_t> network_bytes_sent;   // cNetworkBytesSent
    std::optional<std::uint64_t> memory_used_bytes;    // cMemoryUsed
    std::optional<std::string> container_id;           // cId
    std::optional<std::uint64_t> num_processes;        // cNumProcesses

    bool operator==(const ContainerMetrics&) const = default;
};

struct ProcessMetrics {
    std::int64_t pid = 0;                                    // pId
    std::string name;                                        // pName
    std::uint64_t cpu_time_user_mode = 0;                    // pCpuTimeUserMode
    std::uint64_t cpu_time_kernel_mode = 0;                  // pCpuTimeKernelMode
    std::optional<std::uint64_t> voluntary_ctxt_switches;    // pVoluntaryContextSwitches
    std::optional<std::uint64_t> nonvoluntary_ctxt_switches; // pNonvoluntaryContextSwitches
    std::optional<std::uint64_t> block_io_delays;            // pBlockIODelays
    std::uint64_t resident_set_pages = 0;                    // pResidentSetSize
    std::uint64_t num_threads = 0;                           // pNumThreads

    bool operator==(const ProcessMetrics&) const = default;
};

/// Which snapshot sections to collect; mirrors the -v / -c / -p flags.
struct VerbositySet {
    bool host = false;
    bool container = false;
    bool process = false;

    static VerbositySet all() { return {true, true, true}; }
    bool any() const { return host || container || process; }

    bool operator==(const VerbositySet&) const = default;
};

struct RunMetadata {
    int schema_version = 1;
    double interval_seconds = 1.0;
    VerbositySet verbosity = VerbositySet::all();
    std::int64_t clock_ticks_per_second = 100; // USER_HZ governing clock-tick units
    std::int64_t sector_size_bytes = 512;      // diskstats sectors are 512-byte units
    double start_wall_clock = 0.0;             // epoch seconds
    std::string workload_command;
    std::string output_directory;

    bool operator==(const RunMetadata&) const = default;
};

/// Monotonic nanosecond stamps taken immediately before each section's
/// source files are read. Collection order is fixed: host, container,
/// process, so present stamps are non-decreasing in that order.
struct SectionTimestamps {
    std::optional<std::int64_t> host;
    std::optional<std::int64_t> container;
    std::optional<std::int64_t> process;

    bool operator==(const SectionTimestamps&) const = default;
};

/// One timestamped sample. At least one of host/container/processes is
/// present, as selected by verbosity.
struct Snapshot {
    std::optional<RunMetadata> metadata;
    double wall_clock = 0.0;          // epoch seconds, subsecond precision
    std::int64_t monotonic_clock = 0; // ns, arbitrary epoch
    SectionTimestamps section_timestamps;
    std::optional<HostMetrics> host;
    std::optional<ContainerMetrics> container;
    std::optional<std::vector<ProcessMetrics>> processes;
    std::int64_t collection_duration = 0; // ns spent assembling this snapshot

    bool operator==(const Snapshot&) const = default;
};

// Scalar field tables: map catalog names onto struct members so the
// analysis side can look up any numeric metric by name. Non-scalar fields
// (vLoadAvg, identity strings) are handled separately.

struct HostScalarField {
    std::string_view name;
    std::optional<std::uint64_t> HostMetrics::* member;
};

inline constexpr HostScalarField host_scalar_fields[] = {
    {"vCpuTimeUserMode", &HostMetrics::cpu_time_user_mode},
    {"vCpuTimeKernelMode", &HostMetrics::cpu_time_kernel_mode},
    {"vCpuIdleTime", &HostMetrics::cpu_idle_time},
    {"vCpuTimeIOWait", &HostMetrics::cpu_time_io_wait},
    {"vCpuContextSwitches", &HostMetrics::cpu_context_switches},
    {"vCpuNice", &HostMetrics::cpu_nice},
    {"vCpuSteal", &HostMetrics::cpu_steal},
    {"vDiskSectorReads", &HostMetrics::disk_sector_reads},
    {"vDiskSectorWrites", &HostMetrics::disk_sector_writes},
    {"vDiskReadTime", &HostMetrics::disk_read_time_ms},
    {"vDiskWriteTime", &HostMetrics::disk_write_time_ms},
    {"vNetworkBytesRecvd", &HostMetrics::network_bytes_recvd},
    {"vNetworkBytesSent", &HostMetrics::network_bytes_sent},
    {"vMemoryTotal", &HostMetrics::memory_total_kb},
    {"vMemoryFree", &HostMetrics::memory_free_kb},
    {"vMemoryBuffers", &HostMetrics::memory_buffers_kb},
    {"vMemoryCached", &HostMetrics::memory_cached_kb},
};

struct ContainerScalarField {
    std::string_view name;
    std::optional<std::uint64_t> ContainerMetrics::* member;
};

inline constexpr ContainerScalarField container_scalar_fields[] = {
    {"cCpuTimeUserMode", &ContainerMetrics::cpu_time_user_mode},
    {"cCpuTimeKernelMode", &ContainerMetrics::cpu_time_kernel_mode},
    {"cDiskSectorIO", &ContainerMetrics::disk_sector_io},
    {"cDiskReadBytes", &ContainerMetrics::disk_read_bytes},
    {"cDiskWriteBytes", &ContainerMetrics::disk_write_bytes},
    {"cNetworkBytesRecvd", &ContainerMetrics::network_bytes_recvd},
    {"cNetworkBytesSent", &ContainerMetrics::network_bytes_sent},
    {"cMemoryUsed", &ContainerMetrics::memory_used_bytes},
    {"cNumProcesses", &ContainerMetrics::num_processes},
};

/// Numeric value of one process-level metric for a single process record.
/// Returns nullopt for absent optional fields and for identity fields.
inline std::optional<std::uint64_t> process_scalar(const ProcessMetrics& p, std::string_view name) {
    if (name == "pCpuTimeUserMode") return p.cpu_time_user_mode;
    if (name == "pCpuTimeKernelMode") return p.cpu_time_kernel_mode;
    if (name == "pVoluntaryContextSwitches") return p.voluntary_ctxt_switches;
    if (name == "pNonvoluntaryContextSwitches") return p.nonvoluntary_ctxt_switches;
    if (name == "pBlockIODelays") return p.block_io_delays;
    if (name == "pResidentSetSize") return p.resident_set_pages;
    if (name == "pNumThreads") return p.num_threads;
    return std::nullopt;
}

/// Numeric value of a metric within one snapshot, looked up by catalog name.
/// Process-level metrics are summed across all process records; vLoadAvg
/// yields the 1-minute element. Identity (metadata) fields have no numeric
/// value.
inline std::optional<double> metric_value(const Snapshot& s, std::string_view name) {
    if (name.empty()) return std::nullopt;
    if (name[0] == 'v') {
        if (!s.host) return std::nullopt;
        if (name == "vLoadAvg")
            return s.host->load_avg ? std::optional<double>((*s.host->load_avg)[0]) : std::nullopt;
        for (const auto& f : host_scalar_fields)
            if (f.name == name) {
                const auto& v = (*s.host).*f.member;
                return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
            }
        return std::nullopt;
    }
    if (name[0] == 'c') {
        if (!s.container) return std::nullopt;
        for (const auto& f : container_scalar_fields)
            if (f.name == name) {
                const auto& v = (*s.container).*f.member;
                return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
            }
        return std::nullopt;
    }
    if (name[0] == 'p') {
        if (!s.processes) return std::nullopt;
        double sum = 0;
        bool present = false;
        for (const auto& p : *s.processes) {
            auto v = process_scalar(p, name);
            if (v) {
                sum += static_cast<double>(*v);
                present = true;
            }
        }
        return present ? std::optional<double>(sum) : std::nullopt;
    }
    return std::nullopt;
}

} // namespace resprof
