// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// JSON wire format for snapshots, run metadata, and sampler reports.
// Serialization is deterministic: fixed key order, integers emitted as
// integers, 2-space indent, trailing newline. One snapshot per file.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "resprof/error.hpp"
#include "resprof/metrics.hpp"

namespace resprof {

using ordered_json = nlohmann::ordered_json;

/// How parse_snapshot treats keys it does not know: reject (strict) or
/// ignore (lenient). Lenient keeps old analysis code working on newer files.
enum class ParseStrictness { strict, lenient };

namespace jsondetail {

inline const ordered_json* find(const ordered_json& obj, std::string_view key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline const ordered_json& require(const ordered_json& obj, std::string_view key, std::string_view where) {
    const ordered_json* v = find(obj, key);
    if (!v)
        throw ParseError("malformed document: missing required key '" + std::string(key) + "' in " +
                         std::string(where));
    return *v;
}

inline std::uint64_t as_u64(const ordered_json& v, std::string_view key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ParseError("malformed document: key '" + std::string(key) + "' is not a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::int64_t as_i64(const ordered_json& v, std::string_view key) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ParseError("malformed document: key '" + std::string(key) + "' is not an integer");
    return v.get<std::int64_t>();
}

inline double as_double(const ordered_json& v, std::string_view key) {
    if (!v.is_number())
        throw ParseError("malformed document: key '" + std::string(key) + "' is not a number");
    return v.get<double>();
}

inline std::string as_string(const ordered_json& v, std::string_view key) {
    if (!v.is_string())
        throw ParseError("malformed document: key '" + std::string(key) + "' is not a string");
    return v.get<std::string>();
}

inline void check_known_keys(const ordered_json& obj, std::string_view where,
                             std::initializer_list<std::string_view> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw ParseError("malformed document: unknown key '" + it.key() + "' in " + std::string(where));
    }
}

template <typename T>
void put_opt(ordered_json& obj, const char* key, const std::optional<T>& v) {
    if (v) obj[key] = *v;
}

} // namespace jsondetail

// --- serialization ---------------------------------------------------------

inline ordered_json to_json(const HostMetrics& h) {
    ordered_json j = ordered_json::object();
    using jsondetail::put_opt;
    put_opt(j, "vCpuTimeUserMode", h.cpu_time_user_mode);
    put_opt(j, "vCpuTimeKernelMode", h.cpu_time_kernel_mode);
    put_opt(j, "vCpuIdleTime", h.cpu_idle_time);
    put_opt(j, "vCpuTimeIOWait", h.cpu_time_io_wait);
    put_opt(j, "vCpuContextSwitches", h.cpu_context_switches);
    put_opt(j, "vCpuNice", h.cpu_nice);
    put_opt(j, "vCpuSteal", h.cpu_steal);
    put_opt(j, "vDiskSectorReads", h.disk_sector_reads);
    put_opt(j, "vDiskSectorWrites", h.disk_sector_writes);
    put_opt(j, "vDiskReadTime", h.disk_read_time_ms);
    put_opt(j, "vDiskWriteTime", h.disk_write_time_ms);
    put_opt(j, "vNetworkBytesRecvd", h.network_bytes_recvd);
    put_opt(j, "vNetworkBytesSent", h.network_bytes_sent);
    put_opt(j, "vMemoryTotal", h.memory_total_kb);
    put_opt(j, "vMemoryFree", h.memory_free_kb);
    put_opt(j, "vMemoryBuffers", h.memory_buffers_kb);
    put_opt(j, "vMemoryCached", h.memory_cached_kb);
    if (h.load_avg) j["vLoadAvg"] = *h.load_avg;
    put_opt(j, "vId", h.host_id);
    return j;
}

inline ordered_json to_json(const ContainerMetrics& c) {
    ordered_json j = ordered_json::object();
    using jsondetail::put_opt;
    put_opt(j, "cCpuTimeUserMode", c.cpu_time_user_mode);
    put_opt(j, "cCpuTimeKernelMode", c.cpu_time_kernel_mode);
    put_opt(j, "cDiskSectorIO", c.disk_sector_io);
    put_opt(j, "cDiskReadBytes", c.disk_read_bytes);
    put_opt(j, "cDiskWriteBytes", c.disk_write_bytes);
    put_opt(j, "cNetworkBytesRecvd", c.network_bytes_recvd);
    put_opt(j, "cNetworkBytesSent", c.network_bytes_sent);
    put_opt(j, "cMemoryUsed", c.memory_used_bytes);
    put_opt(j, "cId", c.container_id);
    put_opt(j, "cNumProcesses", c.num_processes);
    return j;
}

inline ordered_json to_json(const ProcessMetrics& p) {
    ordered_json j = ordered_json::object();
    using jsondetail::put_opt;
    j["pId"] = p.pid;
    j["pName"] = p.name;
    j["pCpuTimeUserMode"] = p.cpu_time_user_mode;
    j["pCpuTimeKernelMode"] = p.cpu_time_kernel_mode;
    put_opt(j, "pVoluntaryContextSwitches", p.voluntary_ctxt_switches);
    put_opt(j, "pNonvoluntaryContextSwitches", p.nonvoluntary_ctxt_switches);
    put_opt(j, "pBlockIODelays", p.block_io_delays);
    j["pResidentSetSize"] = p.resident_set_pages;
    j["pNumThreads"] = p.num_threads;
    return j;
}

inline ordered_json to_json(const RunMetadata& m) {
    ordered_json j = ordered_json::object();
    j["schemaVersion"] = m.schema_version;
    j["intervalSeconds"] = m.interval_seconds;
    ordered_json v = ordered_json::array();
    if (m.verbosity.host) v.push_back("host");
    if (m.verbosity.container) v.push_back("container");
    if (m.verbosity.process) v.push_back("process");
    j["verbosity"] = std::move(v);
    j["clockTicksPerSecond"] = m.clock_ticks_per_second;
    j["sectorSizeBytes"] = m.sector_size_bytes;
    j["startWallClock"] = m.start_wall_clock;
    j["workloadCommand"] = m.workload_command;
    j["outputDirectory"] = m.output_directory;
    return j;
}

inline ordered_json to_json(const Snapshot& s) {
    ordered_json j = ordered_json::object();
    if (s.metadata) j["metadata"] = to_json(*s.metadata);
    j["wallClock"] = s.wall_clock;
    j["monotonicClock"] = s.monotonic_clock;
    ordered_json ts = ordered_json::object();
    jsondetail::put_opt(ts, "host", s.section_timestamps.host);
    jsondetail::put_opt(ts, "container", s.section_timestamps.container);
    jsondetail::put_opt(ts, "process", s.section_timestamps.process);
    j["sectionTimestamps"] = std::move(ts);
    if (s.host) j["host"] = to_json(*s.host);
    if (s.container) j["container"] = to_json(*s.container);
    if (s.processes) {
        ordered_json procs = ordered_json::array();
        for (const auto& p : *s.processes) procs.push_back(to_json(p));
        j["processes"] = std::move(procs);
    }
    j["collectionDuration"] = s.collection_duration;
    return j;
}

/// Deterministic one-snapshot-per-file text form.
inline std::string serialize_snapshot(const Snapshot& s) {
    return to_json(s).dump(2) + "\n";
}

// --- parsing ---------------------------------------------------------------

namespace jsondetail {

inline void read_opt_u64(const ordered_json& obj, const char* key, std::optional<std::uint64_t>& out) {
    if (const ordered_json* v = find(obj, key)) out = as_u64(*v, key);
}

inline HostMetrics host_from_json(const ordered_json& j, ParseStrictness strictness) {
    if (!j.is_object()) throw ParseError("malformed document: 'host' is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(j, "host",
                         {"vCpuTimeUserMode", "vCpuTimeKernelMode", "vCpuIdleTime", "vCpuTimeIOWait",
                          "vCpuContextSwitches", "vCpuNice", "vCpuSteal", "vDiskSectorReads",
                          "vDiskSectorWrites", "vDiskReadTime", "vDiskWriteTime", "vNetworkBytesRecvd",
                          "vNetworkBytesSent", "vMemoryTotal", "vMemoryFree", "vMemoryBuffers",
                          "vMemoryCached", "vLoadAvg", "vId"});
    HostMetrics h;
    read_opt_u64(j, "vCpuTimeUserMode", h.cpu_time_user_mode);
    read_opt_u64(j, "vCpuTimeKernelMode", h.cpu_time_kernel_mode);
    read_opt_u64(j, "vCpuIdleTime", h.cpu_idle_time);
    read_opt_u64(j, "vCpuTimeIOWait", h.cpu_time_io_wait);
    read_opt_u64(j, "vCpuContextSwitches", h.cpu_context_switches);
    read_opt_u64(j, "vCpuNice", h.cpu_nice);
    read_opt_u64(j, "vCpuSteal", h.cpu_steal);
    read_opt_u64(j, "vDiskSectorReads", h.disk_sector_reads);
    read_opt_u64(j, "vDiskSectorWrites", h.disk_sector_writes);
    read_opt_u64(j, "vDiskReadTime", h.disk_read_time_ms);
    read_opt_u64(j, "vDiskWriteTime", h.disk_write_time_ms);
    read_opt_u64(j, "vNetworkBytesRecvd", h.network_bytes_recvd);
    read_opt_u64(j, "vNetworkBytesSent", h.network_bytes_sent);
    read_opt_u64(j, "vMemoryTotal", h.memory_total_kb);
    read_opt_u64(j, "vMemoryFree", h.memory_free_kb);
    read_opt_u64(j, "vMemoryBuffers", h.memory_buffers_kb);
    read_opt_u64(j, "vMemoryCached", h.memory_cached_kb);
    if (const ordered_json* v = find(j, "vLoadAvg")) {
        if (!v->is_array() || v->size() != 3)
            throw ParseError("malformed document: 'vLoadAvg' is not a 3-element array");
        std::array<double, 3> load{};
        for (int i = 0; i < 3; ++i) load[i] = as_double((*v)[i], "vLoadAvg");
        h.load_avg = load;
    }
    if (const ordered_json* v = find(j, "vId")) h.host_id = as_string(*v, "vId");
    return h;
}

inline ContainerMetrics container_from_json(const ordered_json& j, ParseStrictness strictness) {
    if (!j.is_object()) throw ParseError("malformed document: 'container' is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(j, "container",
                         {"cCpuTimeUserMode", "cCpuTimeKernelMode", "cDiskSectorIO", "cDiskReadBytes",
                          "cDiskWriteBytes", "cNetworkBytesRecvd", "cNetworkBytesSent", "cMemoryUsed",
                          "cId", "cNumProcesses"});
    ContainerMetrics c;
    read_opt_u64(j, "cCpuTimeUserMode", c.cpu_time_user_mode);
    read_opt_u64(j, "cCpuTimeKernelMode", c.cpu_time_kernel_mode);
    read_opt_u64(j, "cDiskSectorIO", c.disk_sector_io);
    read_opt_u64(j, "cDiskReadBytes", c.disk_read_bytes);
    read_opt_u64(j, "cDiskWriteBytes", c.disk_write_bytes);
    read_opt_u64(j, "cNetworkBytesRecvd", c.network_bytes_recvd);
    read_opt_u64(j, "cNetworkBytesSent", c.network_bytes_sent);
    read_opt_u64(j, "cMemoryUsed", c.memory_used_bytes);
    if (const ordered_json* v = find(j, "cId")) c.container_id = as_string(*v, "cId");
    read_opt_u64(j, "cNumProcesses", c.num_processes);
    return c;
}

inline ProcessMetrics process_from_json(const ordered_json& j, ParseStrictness strictness) {
    if (!j.is_object()) throw ParseError("malformed document: process entry is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(j, "processes[]",
                         {"pId", "pName", "pCpuTimeUserMode", "pCpuTimeKernelMode",
                          "pVoluntaryContextSwitches", "pNonvoluntaryContextSwitches", "pBlockIODelays",
                          "pResidentSetSize", "pNumThreads"});
    ProcessMetrics p;
    p.pid = as_i64(require(j, "pId", "process entry"), "pId");
    p.name = as_string(require(j, "pName", "process entry"), "pName");
    p.cpu_time_user_mode = as_u64(require(j, "pCpuTimeUserMode", "process entry"), "pCpuTimeUserMode");
    p.cpu_time_kernel_mode = as_u64(require(j, "pCpuTimeKernelMode", "process entry"), "pCpuTimeKernelMode");
    read_opt_u64(j, "pVoluntaryContextSwitches", p.voluntary_ctxt_switches);
    read_opt_u64(j, "pNonvoluntaryContextSwitches", p.nonvoluntary_ctxt_switches);
    read_opt_u64(j, "pBlockIODelays", p.block_io_delays);
    p.resident_set_pages = as_u64(require(j, "pResidentSetSize", "process entry"), "pResidentSetSize");
    p.num_threads = as_u64(require(j, "pNumThreads", "process entry"), "pNumThreads");
    return p;
}

inline RunMetadata metadata_from_json(const ordered_json& j, ParseStrictness strictness) {
    if (!j.is_object()) throw ParseError("malformed document: metadata is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(j, "metadata",
                         {"schemaVersion", "intervalSeconds", "verbosity", "clockTicksPerSecond",
                          "sectorSizeBytes", "startWallClock", "workloadCommand", "outputDirectory"});
    RunMetadata m;
    if (const ordered_json* v = find(j, "schemaVersion")) m.schema_version = static_cast<int>(as_i64(*v, "schemaVersion"));
    m.interval_seconds = as_double(require(j, "intervalSeconds", "metadata"), "intervalSeconds");
    const ordered_json& verb = require(j, "verbosity", "metadata");
    if (!verb.is_array()) throw ParseError("malformed document: 'verbosity' is not an array");
    m.verbosity = {};
    for (const auto& entry : verb) {
        std::string level = as_string(entry, "verbosity");
        if (level == "host") m.verbosity.host = true;
        else if (level == "container") m.verbosity.container = true;
        else if (level == "process") m.verbosity.process = true;
        else throw ParseError("malformed document: unknown verbosity level '" + level + "'");
    }
    m.clock_ticks_per_second = as_i64(require(j, "clockTicksPerSecond", "metadata"), "clockTicksPerSecond");
    m.sector_size_bytes = as_i64(require(j, "sectorSizeBytes", "metadata"), "sectorSizeBytes");
    m.start_wall_clock = as_double(require(j, "startWallClock", "metadata"), "startWallClock");
    if (const ordered_json* v = find(j, "workloadCommand")) m.workload_command = as_string(*v, "workloadCommand");
    if (const ordered_json* v = find(j, "outputDirectory")) m.output_directory = as_string(*v, "outputDirectory");
    return m;
}

} // namespace jsondetail

inline Snapshot snapshot_from_json(const ordered_json& j, ParseStrictness strictness) {
    using namespace jsondetail;
    if (!j.is_object()) throw ParseError("malformed document: top level is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(j, "snapshot",
                         {"metadata", "wallClock", "monotonicClock", "sectionTimestamps", "host",
                          "container", "processes", "collectionDuration"});
    Snapshot s;
    if (const ordered_json* v = find(j, "metadata")) s.metadata = metadata_from_json(*v, strictness);
    s.wall_clock = as_double(require(j, "wallClock", "snapshot"), "wallClock");
    s.monotonic_clock = as_i64(require(j, "monotonicClock", "snapshot"), "monotonicClock");
    const ordered_json& ts = require(j, "sectionTimestamps", "snapshot");
    if (!ts.is_object()) throw ParseError("malformed document: 'sectionTimestamps' is not an object");
    if (strictness == ParseStrictness::strict)
        check_known_keys(ts, "sectionTimestamps", {"host", "container", "process"});
    if (const ordered_json* v = find(ts, "host")) s.section_timestamps.host = as_i64(*v, "sectionTimestamps.host");
    if (const ordered_json* v = find(ts, "container")) s.section_timestamps.container = as_i64(*v, "sectionTimestamps.container");
    if (const ordered_json* v = find(ts, "process")) s.section_timestamps.process = as_i64(*v, "sectionTimestamps.process");
    if (const ordered_json* v = find(j, "host")) s.host = host_from_json(*v, strictness);
    if (const ordered_json* v = find(j, "container")) s.container = container_from_json(*v, strictness);
    if (const ordered_json* v = find(j, "processes")) {
        if (!v->is_array()) throw ParseError("malformed document: 'processes' is not an array");
        std::vector<ProcessMetrics> procs;
        for (const auto& entry : *v) procs.push_back(process_from_json(entry, strictness));
        s.processes = std::move(procs);
    }
    s.collection_duration = as_i64(require(j, "collectionDuration", "snapshot"), "collectionDuration");
    if (!s.host && !s.container && !s.processes)
        throw ParseError("malformed document: snapshot has no host, container, or processes section");
    return s;
}

/// Parse a snapshot document. Malformed input raises ParseError naming the
/// first offending key (or the parse position for non-JSON input).
inline Snapshot parse_snapshot(std::string_view doc, ParseStrictness strictness = ParseStrictness::lenient) {
    ordered_json j;
    try {
        j = ordered_json::parse(doc);
    } catch (const nlohmann::json::exception& e) {
        // parse_error is the common case, but numeric literals that overflow a
        // double (for example "5e580") surface as out_of_range, so the whole
        // nlohmann exception family maps to ParseError here.
        throw ParseError(std::string("malformed document: ") + e.what());
    }
    return snapshot_from_json(j, strictness);
}

inline std::string serialize_run_metadata(const RunMetadata& m) {
    return to_json(m).dump(2) + "\n";
}

inline RunMetadata parse_run_metadata(std::string_view doc,
                                      ParseStrictness strictness = ParseStrictness::lenient) {
    ordered_json j = ordered_json::parse(doc, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed run metadata document");
    return jsondetail::metadata_from_json(j, strictness);
}

} // namespace resprof
