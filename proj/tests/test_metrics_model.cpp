// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "resprof/metrics.hpp"

using namespace resprof;

TEST_CASE("catalog: size, uniqueness, and per-level counts") {
    const auto& table = catalog();
    REQUIRE(table.size() == 38);
    std::set<std::string_view> names;
    std::size_t host_count = 0, container_count = 0, process_count = 0;
    for (const auto& d : table) {
        REQUIRE(names.insert(d.name).second);
        switch (d.level) {
        case MetricLevel::host: ++host_count; break;
        case MetricLevel::container: ++container_count; break;
        case MetricLevel::process: ++process_count; break;
        }
    }
    REQUIRE(host_count == 19);
    REQUIRE(container_count == 10);
    REQUIRE(process_count == 9);
}

TEST_CASE("catalog: every name starts with its level prefix") {
    for (const auto& d : catalog()) {
        REQUIRE_FALSE(d.name.empty());
        REQUIRE(d.name[0] == level_prefix(d.level));
        REQUIRE_FALSE(d.source.empty());
        REQUIRE_FALSE(d.unit.empty());
    }
}

TEST_CASE("catalog: identity fields are the only text-unit entries") {
    std::set<std::string_view> text_fields;
    for (const auto& d : catalog())
        if (d.unit == "text") {
            text_fields.insert(d.name);
            REQUIRE(d.category == MetricCategory::metadata);
        }
    REQUIRE(text_fields == std::set<std::string_view>{"vId", "cId", "pName"});
}

TEST_CASE("find_metric: hit and miss") {
    const MetricDescriptor* d = find_metric("vDiskSectorWrites");
    REQUIRE(d != nullptr);
    REQUIRE(d->kind == MetricKind::counter);
    REQUIRE(d->category == MetricCategory::disk);
    REQUIRE(d->unit == "sectors");
    REQUIRE(find_metric("vNoSuchMetric") == nullptr);
    REQUIRE(find_metric("") == nullptr);
}

TEST_CASE("scalar field tables cover every numeric non-special metric") {
    // Host: everything except vLoadAvg (array) and vId (text).
    std::set<std::string_view> host_names;
    for (const auto& f : host_scalar_fields) host_names.insert(f.name);
    REQUIRE(host_names.size() == 17);
    // Container: everything except cId (text).
    std::set<std::string_view> container_names;
    for (const auto& f : container_scalar_fields) container_names.insert(f.name);
    REQUIRE(container_names.size() == 9);
    for (const auto& d : catalog()) {
        if (d.unit == "text" || d.name == "vLoadAvg" || d.level == MetricLevel::process) continue;
        if (d.level == MetricLevel::host) REQUIRE(host_names.count(d.name) == 1);
        if (d.level == MetricLevel::container) REQUIRE(container_names.count(d.name) == 1);
    }
}

TEST_CASE("metric_value: host scalars, load average, and absences") {
    Snapshot s;
    HostMetrics h;
    h.cpu_time_user_mode = 123;
    h.load_avg = {{0.5, 0.4, 0.3}};
    s.host = h;
    REQUIRE(metric_value(s, "vCpuTimeUserMode") == 123.0);
    REQUIRE(metric_value(s, "vLoadAvg") == 0.5); // the 1-minute element
    REQUIRE_FALSE(metric_value(s, "vMemoryFree").has_value());
    REQUIRE_FALSE(metric_value(s, "vId").has_value());        // text metric
    REQUIRE_FALSE(metric_value(s, "cCpuTimeUserMode").has_value()); // section absent
    REQUIRE_FALSE(metric_value(s, "bogus").has_value());
    REQUIRE_FALSE(metric_value(s, "").has_value());
}

TEST_CASE("metric_value: container scalars") {
    Snapshot s;
    ContainerMetrics c;
    c.disk_write_bytes = 4096;
    c.num_processes = 7;
    s.container = c;
    REQUIRE(metric_value(s, "cDiskWriteBytes") == 4096.0);
    REQUIRE(metric_value(s, "cNumProcesses") == 7.0);
    REQUIRE_FALSE(metric_value(s, "cMemoryUsed").has_value());
    REQUIRE_FALSE(metric_value(s, "cId").has_value());
}

TEST_CASE("metric_value: process metrics are summed across records") {
    Snapshot s;
    ProcessMetrics p1;
    p1.pid = 1;
    p1.cpu_time_user_mode = 100;
    p1.num_threads = 2;
    p1.block_io_delays = 5;
    ProcessMetrics p2;
    p2.pid = 2;
    p2.cpu_time_user_mode = 50;
    p2.num_threads = 3;
    // p2 has no block_io_delays: the metric still sums over the present ones.
    s.processes = std::vector<ProcessMetrics>{p1, p2};
    REQUIRE(metric_value(s, "pCpuTimeUserMode") == 150.0);
    REQUIRE(metric_value(s, "pNumThreads") == 5.0);
    REQUIRE(metric_value(s, "pBlockIODelays") == 5.0);
    REQUIRE_FALSE(metric_value(s, "pVoluntaryContextSwitches").has_value());
    REQUIRE_FALSE(metric_value(s, "pName").has_value());

    Snapshot empty;
    empty.processes = std::vector<ProcessMetrics>{};
    REQUIRE_FALSE(metric_value(empty, "pCpuTimeUserMode").has_value());
}

TEST_CASE("verbosity set basics") {
    VerbositySet none;
    REQUIRE_FALSE(none.any());
    REQUIRE(VerbositySet::all().any());
    VerbositySet only_host;
    only_host.host = true;
    REQUIRE(only_host.any());
    REQUIRE(only_host != VerbositySet::all());
}
