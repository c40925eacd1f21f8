// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "resprof/collector.hpp"
#include "resprof/snapshot_json.hpp"
#include "support/fakes.hpp"

using namespace resprof;
using resprof::testing::FixedClock;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

fs::path fixture_root(const std::string& scenario) {
    return fs::path(RESPROF_FIXTURES) / scenario;
}

CollectorConfig fixture_config(const std::string& scenario) {
    CollectorConfig cfg;
    cfg.proc_root = (fixture_root(scenario) / "proc").string();
    cfg.cgroup_root = (fixture_root(scenario) / "cgroup").string();
    return cfg;
}

// Order-insensitive structural equality against the scenario's expectation
// file, which was produced by an independent implementation.
void check_against_expected(const std::string& scenario) {
    FixedClock clock;
    Collector collector(fixture_config(scenario), clock);
    Snapshot snap = collector.collect();
    auto expected_doc = fsutil::read_file(fixture_root(scenario) / "expected.json");
    REQUIRE(expected_doc.has_value());
    nlohmann::json expected = nlohmann::json::parse(*expected_doc);
    nlohmann::json actual = nlohmann::json::parse(serialize_snapshot(snap));
    INFO("scenario: " << scenario);
    INFO("diff (expected -> actual): " << nlohmann::json::diff(expected, actual).dump(2));
    REQUIRE(actual == expected);
}

} // namespace

TEST_CASE("collector matches the independent expectation for every scenario") {
    const char* scenarios[] = {
        "basic",          "zeros",          "weird-comm",       "truncated-stat",
        "old-kernel-stat", "malformed-netdev", "no-status-keys", "multi-device",
        "no-blkio-sectors", "pid-vanish",
    };
    for (const char* scenario : scenarios) {
        DYNAMIC_SECTION("scenario " << scenario) { check_against_expected(scenario); }
    }
}

TEST_CASE("collector: serialized basic snapshot is byte-stable") {
    FixedClock clock;
    Collector collector(fixture_config("basic"), clock);
    std::string text = serialize_snapshot(collector.collect());

    const fs::path file = fs::path(RESPROF_GOLDEN) / "snapshot_pretty.json";
    if (std::getenv("RESPROF_UPDATE_GOLDEN")) {
        fsutil::write_file(file, text);
        SUCCEED("golden snapshot updated");
        return;
    }
    auto expected = fsutil::read_file(file);
    REQUIRE(expected.has_value());
    REQUIRE(text == *expected);
}

TEST_CASE("collector: basic scenario collects without warnings") {
    FixedClock clock;
    Collector collector(fixture_config("basic"), clock);
    (void)collector.collect();
    REQUIRE(collector.warnings().empty());
    REQUIRE(collector.skipped_processes() == 0);
}

TEST_CASE("collector: malformed rows warn once even across repeat collections") {
    FixedClock clock;
    Collector collector(fixture_config("malformed-netdev"), clock);
    Snapshot first = collector.collect();
    Snapshot second = collector.collect();
    REQUIRE_FALSE(first.host->network_bytes_recvd.has_value());
    REQUIRE_FALSE(first.container->network_bytes_recvd.has_value());
    REQUIRE(second.host == first.host);
    REQUIRE(collector.warnings().size() == 1);
    REQUIRE_THAT(collector.warnings()[0], ContainsSubstring("net/dev"));
}

TEST_CASE("collector: unparseable pid stat is skipped and counted") {
    FixedClock clock;
    Collector collector(fixture_config("truncated-stat"), clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.processes->size() == 3); // pid 99 dropped
    REQUIRE(collector.skipped_processes() == 1);
    REQUIRE(collector.warnings().size() == 1);
    REQUIRE_THAT(collector.warnings()[0], ContainsSubstring("stat"));
}

TEST_CASE("collector: a pid directory without stat counts as vanished") {
    FixedClock clock;
    Collector collector(fixture_config("pid-vanish"), clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.processes->size() == 3); // pid 314 vanished mid-enumeration
    REQUIRE(collector.skipped_processes() == 1);
}

TEST_CASE("collector: missing blkio.sectors degrades to an absent metric") {
    FixedClock clock;
    Collector collector(fixture_config("no-blkio-sectors"), clock);
    Snapshot snap = collector.collect();
    REQUIRE_FALSE(snap.container->disk_sector_io.has_value());
    REQUIRE(snap.container->disk_read_bytes.has_value());
    bool mentioned = false;
    for (const auto& w : collector.warnings())
        if (w.find("blkio.sectors") != std::string::npos) mentioned = true;
    REQUIRE(mentioned);
}

TEST_CASE("collector: verbosity selects which sections exist") {
    FixedClock clock;
    CollectorConfig cfg = fixture_config("basic");
    cfg.verbosity = {};
    cfg.verbosity.host = true;
    Collector collector(cfg, clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.host.has_value());
    REQUIRE_FALSE(snap.container.has_value());
    REQUIRE_FALSE(snap.processes.has_value());
    REQUIRE(snap.section_timestamps.host.has_value());
    REQUIRE_FALSE(snap.section_timestamps.container.has_value());
    REQUIRE_FALSE(snap.section_timestamps.process.has_value());
}

TEST_CASE("collector: device filter overrides the partition heuristic") {
    FixedClock clock;
    CollectorConfig cfg = fixture_config("multi-device");
    cfg.device_filter = std::set<std::string, std::less<>>{"sda", "sda1"};
    Collector collector(cfg, clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.host->disk_sector_reads == 1000 + 400);
    REQUIRE(snap.host->disk_sector_writes == 2000 + 900);
    REQUIRE(snap.host->disk_read_time_ms == 10 + 4);
    REQUIRE(snap.host->disk_write_time_ms == 20 + 9);
}

TEST_CASE("collector: loopback traffic counts only when asked for") {
    FixedClock clock;
    CollectorConfig cfg = fixture_config("basic");
    cfg.include_loopback = true;
    Collector collector(cfg, clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.host->network_bytes_recvd == 51749236u + 704364u);
    REQUIRE(snap.host->network_bytes_sent == 3118134u + 704364u);
}

TEST_CASE("collector: configuration errors are rejected at construction") {
    FixedClock clock;
    CollectorConfig none = fixture_config("basic");
    none.verbosity = {};
    REQUIRE_THROWS_AS(Collector(none, clock), ConfigError);

    CollectorConfig bad_proc = fixture_config("basic");
    bad_proc.proc_root = "/nonexistent/proc-root";
    REQUIRE_THROWS_WITH(Collector(bad_proc, clock), ContainsSubstring("proc root"));

    CollectorConfig bad_cgroup = fixture_config("basic");
    bad_cgroup.cgroup_root = "/nonexistent/cgroup-root";
    REQUIRE_THROWS_WITH(Collector(bad_cgroup, clock), ContainsSubstring("cgroup root"));

    // A missing cgroup root is fine when container metrics are not requested.
    CollectorConfig host_only = bad_cgroup;
    host_only.verbosity = {};
    host_only.verbosity.host = true;
    REQUIRE_NOTHROW(Collector(host_only, clock));
}

TEST_CASE("collector: a v2 cgroup hierarchy is refused for container metrics") {
    FixedClock clock;
    CollectorConfig cfg = fixture_config("cgroup-v2");
    REQUIRE_THROWS_WITH(Collector(cfg, clock), ContainsSubstring("v2"));
    cfg.verbosity = {};
    cfg.verbosity.host = true;
    cfg.verbosity.process = true;
    REQUIRE_NOTHROW(Collector(cfg, clock));
}

TEST_CASE("collector: cgroup path scopes container files and the pid set") {
    const fs::path temp = fs::temp_directory_path() / "resprof-test-cgpath";
    fs::remove_all(temp);
    const fs::path group = temp / "cgroup";
    fs::create_directories(group / "cpuacct/docker/abc");
    fs::create_directories(group / "blkio/docker/abc");
    fs::create_directories(group / "memory/docker/abc");
    fsutil::write_file(group / "cpuacct/docker/abc/cpuacct.stat", "user 11\nsystem 22\n");
    fsutil::write_file(group / "cpuacct/docker/abc/cgroup.procs", "1\n4096\n");
    fsutil::write_file(group / "blkio/docker/abc/blkio.sectors", "8:0 100\nTotal 100\n");
    fsutil::write_file(group / "blkio/docker/abc/blkio.throttle.io_service_bytes",
                       "8:0 Read 10\n8:0 Write 20\nTotal 30\n");
    fsutil::write_file(group / "memory/docker/abc/memory.usage_in_bytes", "12345\n");

    FixedClock clock;
    CollectorConfig cfg;
    cfg.proc_root = (fixture_root("basic") / "proc").string();
    cfg.cgroup_root = group.string();
    cfg.cgroup_path = "docker/abc";
    cfg.verbosity = {};
    cfg.verbosity.container = true;
    cfg.verbosity.process = true;
    Collector collector(cfg, clock);
    Snapshot snap = collector.collect();

    REQUIRE(snap.container->cpu_time_user_mode == 11);
    REQUIRE(snap.container->cpu_time_kernel_mode == 22);
    REQUIRE(snap.container->disk_sector_io == 100);
    REQUIRE(snap.container->disk_read_bytes == 10);
    REQUIRE(snap.container->disk_write_bytes == 20);
    REQUIRE(snap.container->memory_used_bytes == 12345);
    REQUIRE(snap.container->num_processes == 2);
    // Process sampling narrows to the cgroup members: pid 42 is excluded.
    REQUIRE(snap.processes->size() == 2);
    REQUIRE((*snap.processes)[0].pid == 1);
    REQUIRE((*snap.processes)[1].pid == 4096);
    fs::remove_all(temp);
}

TEST_CASE("collector: unreadable cgroup.procs falls back to a full scan") {
    FixedClock clock;
    CollectorConfig cfg = fixture_config("basic");
    cfg.cgroup_path = "does-not-exist";
    cfg.verbosity = {};
    cfg.verbosity.process = true;
    Collector collector(cfg, clock);
    Snapshot snap = collector.collect();
    REQUIRE(snap.processes->size() == 3);
    bool mentioned = false;
    for (const auto& w : collector.warnings())
        if (w.find("falling back") != std::string::npos) mentioned = true;
    REQUIRE(mentioned);
}
