// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Pure text parsers for the kernel-exposed source files. Each parser is a
// function of its input string only, with no filesystem access, so the whole
// set is testable from fixture files without root or a live kernel.
// Malformed input raises ParseError; it never crashes.

#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "resprof/error.hpp"
#include "resprof/text.hpp"

namespace resprof {

/// Aggregate "cpu " line of /proc/stat plus the ctxt line. Values are
/// clock ticks except contextSwitches.
struct CpuStatLine {
    std::uint64_t user = 0;
    std::uint64_t nice = 0;
    std::uint64_t system = 0;
    std::uint64_t idle = 0;
    std::uint64_t iowait = 0;
    std::uint64_t irq = 0;
    std::uint64_t softirq = 0;
    std::uint64_t steal = 0;
    std::uint64_t context_switches = 0;

    bool operator==(const CpuStatLine&) const = default;
};

/// One whole-device row of /proc/diskstats.
struct DiskStatsEntry {
    std::string device_name;
    std::uint64_t sectors_read = 0;    // column 6
    std::uint64_t sectors_written = 0; // column 10
    std::uint64_t read_time_ms = 0;    // column 7
    std::uint64_t write_time_ms = 0;   // column 11

    bool operator==(const DiskStatsEntry&) const = default;
};

/// One interface row of /proc/net/dev.
struct NetDevEntry {
    std::string interface_name;
    std::uint64_t bytes_recvd = 0; // first field after the colon
    std::uint64_t bytes_sent = 0;  // ninth field after the colon

    bool operator==(const NetDevEntry&) const = default;
};

/// /proc/[pid]/stat. Fields are numbered 1-based as in proc(5); comm is
/// field 2 and is delimited by the *last* ')' so embedded spaces and
/// parentheses survive.
struct PidStatRecord {
    std::int64_t pid = 0;
    std::string comm;
    std::uint64_t utime = 0;       // field 14
    std::uint64_t stime = 0;       // field 15
    std::uint64_t num_threads = 0; // field 20
    std::uint64_t rss_pages = 0;   // field 24
    std::optional<std::uint64_t> delayacct_blkio_ticks; // field 42, absent on old kernels

    bool operator==(const PidStatRecord&) const = default;
};

/// Context-switch counters from /proc/[pid]/status. Both keys are missing
/// on very old kernels, so absence is not an error.
struct PidStatusRecord {
    std::optional<std::uint64_t> voluntary_ctxt_switches;
    std::optional<std::uint64_t> nonvoluntary_ctxt_switches;

    bool operator==(const PidStatusRecord&) const = default;
};

/// cpuacct.stat of a cgroup-v1 cpuacct controller.
struct CgroupCpuacctStat {
    std::uint64_t user = 0;
    std::uint64_t system = 0;

    bool operator==(const CgroupCpuacctStat&) const = default;
};

/// Aggregated blkio accounting. sectorsTotal is absent when blkio.sectors
/// was not provided (the file is removed on newer kernels).
struct CgroupBlkio {
    std::optional<std::uint64_t> sectors_total;
    std::uint64_t read_bytes = 0;
    std::uint64_t write_bytes = 0;

    bool operator==(const CgroupBlkio&) const = default;
};

namespace detail {

inline std::uint64_t require_u64(std::string_view tok, std::string_view context) {
    auto v = text::to_u64(tok);
    if (!v) throw ParseError(std::string(context) + ": invalid number '" + std::string(tok) + "'");
    return *v;
}

} // namespace detail

/// Parse a full /proc/stat document. Values come from the aggregate "cpu "
/// line; contextSwitches from the "ctxt" line. Either line missing is a
/// format error.
inline CpuStatLine parse_proc_stat(std::string_view doc) {
    CpuStatLine out;
    bool saw_cpu = false;
    bool saw_ctxt = false;
    for (std::string_view line : text::split_lines(doc)) {
        if (!saw_cpu && text::starts_with(line, "cpu ")) {
            auto fields = text::split_ws(line.substr(4));
            if (fields.size() < 8)
                throw ParseError("/proc/stat: cpu line has " + std::to_string(fields.size()) +
                                 " fields, expected at least 8");
            out.user = detail::require_u64(fields[0], "/proc/stat cpu.user");
            out.nice = detail::require_u64(fields[1], "/proc/stat cpu.nice");
            out.system = detail::require_u64(fields[2], "/proc/stat cpu.system");
            out.idle = detail::require_u64(fields[3], "/proc/stat cpu.idle");
            out.iowait = detail::require_u64(fields[4], "/proc/stat cpu.iowait");
            out.irq = detail::require_u64(fields[5], "/proc/stat cpu.irq");
            out.softirq = detail::require_u64(fields[6], "/proc/stat cpu.softirq");
            out.steal = detail::require_u64(fields[7], "/proc/stat cpu.steal");
            saw_cpu = true;
        } else if (!saw_ctxt && text::starts_with(line, "ctxt ")) {
            auto fields = text::split_ws(line.substr(5));
            if (fields.empty()) throw ParseError("/proc/stat: ctxt line has no value");
            out.context_switches = detail::require_u64(fields[0], "/proc/stat ctxt");
            saw_ctxt = true;
        }
    }
    if (!saw_cpu) throw ParseError("/proc/stat: missing aggregate 'cpu ' line");
    if (!saw_ctxt) throw ParseError("/proc/stat: missing 'ctxt' line");
    return out;
}

namespace detail {

// Partition heuristic for diskstats rows when no explicit filter is given:
// a name is a partition if it equals another device name in the same file
// followed by digits, optionally with a 'p' separator (sda1 of sda,
// nvme0n1p2 of nvme0n1). Names without such a parent are whole devices.
inline bool is_partition_of_any(std::string_view name, const std::set<std::string, std::less<>>& names) {
    for (std::size_t plen = 1; plen < name.size(); ++plen) {
        std::string_view base = name.substr(0, plen);
        std::string_view rest = name.substr(plen);
        if (rest[0] == 'p') rest.remove_prefix(1);
        if (rest.empty()) continue;
        bool all_digits = true;
        for (char ch : rest)
            if (!std::isdigit(static_cast<unsigned char>(ch))) { all_digits = false; break; }
        if (all_digits && names.count(base)) return true;
    }
    return false;
}

} // namespace detail

/// Parse /proc/diskstats. With a filter, exactly the named devices are
/// returned; without one, partitions are dropped by the name heuristic and
/// whole devices kept. Rows with fewer than 14 columns are a format error.
inline std::vector<DiskStatsEntry> parse_proc_diskstats(
    std::string_view doc,
    const std::optional<std::set<std::string, std::less<>>>& device_filter = std::nullopt) {
    std::vector<DiskStatsEntry> all;
    std::set<std::string, std::less<>> names;
    for (std::string_view line : text::split_lines(doc)) {
        auto fields = text::split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() < 14)
            throw ParseError("/proc/diskstats: row '" + std::string(text::trim(line)) +
                             "' has fewer than 14 columns");
        DiskStatsEntry e;
        e.device_name = std::string(fields[2]);
        e.sectors_read = detail::require_u64(fields[5], "/proc/diskstats sectors-read");
        e.read_time_ms = detail::require_u64(fields[6], "/proc/diskstats read-time");
        e.sectors_written = detail::require_u64(fields[9], "/proc/diskstats sectors-written");
        e.write_time_ms = detail::require_u64(fields[10], "/proc/diskstats write-time");
        names.insert(e.device_name);
        all.push_back(std::move(e));
    }
    std::vector<DiskStatsEntry> out;
    for (auto& e : all) {
        if (device_filter) {
            if (device_filter->count(e.device_name)) out.push_back(std::move(e));
        } else if (!detail::is_partition_of_any(e.device_name, names)) {
            out.push_back(std::move(e));
        }
    }
    return out;
}

/// Parse /proc/net/dev: two header lines, then one row per interface.
inline std::vector<NetDevEntry> parse_proc_net_dev(std::string_view doc, bool exclude_loopback) {
    auto lines = text::split_lines(doc);
    if (lines.empty()) throw ParseError("/proc/net/dev: empty document");
    if (lines.size() < 2 || lines[1].find("bytes") == std::string_view::npos)
        throw ParseError("/proc/net/dev: malformed header");
    std::vector<NetDevEntry> out;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (text::trim(line).empty()) continue;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("/proc/net/dev: row without interface colon: '" +
                             std::string(text::trim(line)) + "'");
        NetDevEntry e;
        e.interface_name = std::string(text::trim(line.substr(0, colon)));
        auto fields = text::split_ws(line.substr(colon + 1));
        if (fields.size() < 9)
            throw ParseError("/proc/net/dev: row for '" + e.interface_name + "' has " +
                             std::to_string(fields.size()) + " fields, expected at least 9");
        e.bytes_recvd = detail::require_u64(fields[0], "/proc/net/dev rx-bytes");
        e.bytes_sent = detail::require_u64(fields[8], "/proc/net/dev tx-bytes");
        if (exclude_loopback && e.interface_name == "lo") continue;
        out.push_back(std::move(e));
    }
    return out;
}

/// Parse one /proc/[pid]/stat line. comm is recovered from the last ')',
/// after which the numeric tail starts at field 3.
inline PidStatRecord parse_pid_stat(std::string_view doc) {
    std::string_view line = text::trim(doc);
    std::size_t open = line.find('(');
    std::size_t close = line.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        throw ParseError("/proc/[pid]/stat: no parenthesized comm field");
    PidStatRecord out;
    auto pid_tok = text::trim(line.substr(0, open));
    auto pid = text::to_u64(pid_tok);
    if (!pid) throw ParseError("/proc/[pid]/stat: invalid pid '" + std::string(pid_tok) + "'");
    out.pid = static_cast<std::int64_t>(*pid);
    out.comm = std::string(line.substr(open + 1, close - open - 1));
    auto tail = text::split_ws(line.substr(close + 1));
    // tail[0] is field 3 (state); field N lives at tail[N - 3]
    auto field = [&](std::size_t n) -> std::string_view { return tail[n - 3]; };
    if (tail.size() < 24 - 2)
        throw ParseError("/proc/[pid]/stat: only " + std::to_string(tail.size() + 2) +
                         " fields, expected at least 24");
    out.utime = detail::require_u64(field(14), "/proc/[pid]/stat utime");
    out.stime = detail::require_u64(field(15), "/proc/[pid]/stat stime");
    out.num_threads = detail::require_u64(field(20), "/proc/[pid]/stat num_threads");
    out.rss_pages = detail::require_u64(field(24), "/proc/[pid]/stat rss");
    if (tail.size() >= 42 - 2)
        out.delayacct_blkio_ticks =
            detail::require_u64(field(42), "/proc/[pid]/stat delayacct_blkio_ticks");
    return out;
}

/// Extract the context-switch counters from /proc/[pid]/status. Missing
/// keys yield absent fields; separator whitespace is normalized away.
inline PidStatusRecord parse_pid_status(std::string_view doc) {
    PidStatusRecord out;
    for (std::string_view line : text::split_lines(doc)) {
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string_view key = text::trim(line.substr(0, colon));
        std::string_view value = text::trim(line.substr(colon + 1));
        if (key == "voluntary_ctxt_switches")
            out.voluntary_ctxt_switches = detail::require_u64(value, "/proc/[pid]/status voluntary_ctxt_switches");
        else if (key == "nonvoluntary_ctxt_switches")
            out.nonvoluntary_ctxt_switches = detail::require_u64(value, "/proc/[pid]/status nonvoluntary_ctxt_switches");
    }
    return out;
}

/// Parse cpuacct.stat ("user N" / "system M" in either order).
inline CgroupCpuacctStat parse_cgroup_cpuacct(std::string_view doc) {
    CgroupCpuacctStat out;
    bool saw_user = false;
    bool saw_system = false;
    for (std::string_view line : text::split_lines(doc)) {
        auto fields = text::split_ws(line);
        if (fields.size() < 2) continue;
        if (fields[0] == "user") {
            out.user = detail::require_u64(fields[1], "cpuacct.stat user");
            saw_user = true;
        } else if (fields[0] == "system") {
            out.system = detail::require_u64(fields[1], "cpuacct.stat system");
            saw_system = true;
        }
    }
    if (!saw_user) throw ParseError("cpuacct.stat: missing 'user' line");
    if (!saw_system) throw ParseError("cpuacct.stat: missing 'system' line");
    return out;
}

/// Sum blkio accounting over device rows. readBytes/writeBytes come from
/// "Read"/"Write" rows of blkio.throttle.io_service_bytes; the per-device
/// and trailing "Total" rows are excluded so nothing is double counted.
/// Unrecognized rows are skipped, not fatal.
inline CgroupBlkio parse_cgroup_blkio(const std::optional<std::string>& sectors_doc,
                                      std::string_view service_bytes_doc) {
    CgroupBlkio out;
    for (std::string_view line : text::split_lines(service_bytes_doc)) {
        auto fields = text::split_ws(line);
        if (fields.size() != 3) continue; // the global "Total N" row lands here
        auto value = text::to_u64(fields[2]);
        if (!value) continue;
        if (fields[1] == "Read") out.read_bytes += *value;
        else if (fields[1] == "Write") out.write_bytes += *value;
    }
    if (sectors_doc) {
        std::uint64_t total = 0;
        for (std::string_view line : text::split_lines(*sectors_doc)) {
            auto fields = text::split_ws(line);
            if (fields.size() != 2 || fields[0] == "Total") continue;
            auto value = text::to_u64(fields[1]);
            if (value) total += *value;
        }
        out.sectors_total = total;
    }
    return out;
}

/// MemTotal/MemFree/Buffers/Cached from /proc/meminfo, in kilobytes.
/// Keys a kernel does not emit stay absent.
struct MemInfo {
    std::optional<std::uint64_t> total_kb;
    std::optional<std::uint64_t> free_kb;
    std::optional<std::uint64_t> buffers_kb;
    std::optional<std::uint64_t> cached_kb;

    bool operator==(const MemInfo&) const = default;
};

inline MemInfo parse_proc_meminfo(std::string_view doc) {
    MemInfo out;
    for (std::string_view line : text::split_lines(doc)) {
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string_view key = text::trim(line.substr(0, colon));
        auto fields = text::split_ws(line.substr(colon + 1));
        if (fields.empty()) continue;
        auto value = text::to_u64(fields[0]);
        if (!value) throw ParseError("/proc/meminfo: invalid value for '" + std::string(key) + "'");
        if (key == "MemTotal") out.total_kb = *value;
        else if (key == "MemFree") out.free_kb = *value;
        else if (key == "Buffers") out.buffers_kb = *value;
        else if (key == "Cached") out.cached_kb = *value;
    }
    return out;
}

/// First three fields of /proc/loadavg (1/5/15 minute averages).
inline std::array<double, 3> parse_proc_loadavg(std::string_view doc) {
    auto fields = text::split_ws(text::trim(doc));
    if (fields.size() < 3) throw ParseError("/proc/loadavg: expected at least 3 fields");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        auto v = text::to_double(fields[i]);
        if (!v) throw ParseError("/proc/loadavg: invalid value '" + std::string(fields[i]) + "'");
        out[i] = *v;
    }
    return out;
}

/// Container id from /proc/self/cgroup: the last path segment of the first
/// hierarchy line. Absent for the root cgroup.
inline std::optional<std::string> parse_self_cgroup_id(std::string_view doc) {
    auto lines = text::split_lines(doc);
    if (lines.empty()) return std::nullopt;
    std::string_view line = lines[0];
    std::size_t first = line.find(':');
    if (first == std::string_view::npos) return std::nullopt;
    std::size_t second = line.find(':', first + 1);
    if (second == std::string_view::npos) return std::nullopt;
    std::string_view path = text::trim(line.substr(second + 1));
    std::size_t slash = path.rfind('/');
    if (slash == std::string_view::npos) return std::nullopt;
    std::string_view segment = path.substr(slash + 1);
    if (segment.empty()) return std::nullopt;
    return std::string(segment);
}

} // namespace resprof
