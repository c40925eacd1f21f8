#!/usr/bin/env python3
# Copyright 2026 resprof contributors
# SPDX-License-Identifier: Apache-2.0
"""Independent oracle for the fixture expectations.

This script derives the expected collector output (expected.json per fixture
scenario) and the expected delta CSVs for the golden run directory from the
documented file formats alone. It shares no code with the C++ library; the
test suite compares library output against these files, so any disagreement
points at a real bug on one side.

Usage:
    oracle.py expected   # rewrite tests/fixtures/*/expected.json
    oracle.py deltas     # rewrite tests/golden/deltas_t1.csv / deltas_t2.csv
    oracle.py all
"""
import json
import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")
GOLDEN = os.path.join(HERE, "..", "golden")

# The fixture tests drive the collector with a frozen clock reading these
# exact values, so section timestamps and durations are fully predictable.
WALL_CLOCK = 1700000000.0
MONO_CLOCK = 5_000_000_000


def read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError:
        return None


# --- host level -------------------------------------------------------------

def host_cpu(doc):
    """Aggregate 'cpu ' line: user nice system idle iowait irq softirq steal;
    'ctxt N' line for context switches."""
    out = {}
    cpu = ctxt = None
    for line in doc.splitlines():
        if line.startswith("cpu ") and cpu is None:
            cpu = line.split()[1:]
        elif line.startswith("ctxt ") and ctxt is None:
            ctxt = line.split()[1]
    if cpu is None or ctxt is None or len(cpu) < 8:
        return {}
    out["vCpuTimeUserMode"] = int(cpu[0])
    out["vCpuTimeKernelMode"] = int(cpu[2])
    out["vCpuIdleTime"] = int(cpu[3])
    out["vCpuTimeIOWait"] = int(cpu[4])
    out["vCpuContextSwitches"] = int(ctxt)
    out["vCpuNice"] = int(cpu[1])
    out["vCpuSteal"] = int(cpu[7])
    return out


def is_partition(name, all_names):
    """A device name that equals another device plus digits (optionally with
    a 'p' separator) is a partition of that device."""
    for base in all_names:
        if base == name or not name.startswith(base):
            continue
        rest = name[len(base):]
        if rest.startswith("p"):
            rest = rest[1:]
        if rest and rest.isdigit():
            return True
    return False


def host_disk(doc):
    """diskstats columns (1-based): 3 name, 6 sectors read, 7 read ms,
    10 sectors written, 11 write ms. Whole devices only."""
    rows = []
    for line in doc.splitlines():
        cols = line.split()
        if not cols:
            continue
        if len(cols) < 14:
            return {}  # malformed file: the collector drops the whole section
        rows.append((cols[2], int(cols[5]), int(cols[6]), int(cols[9]), int(cols[10])))
    names = {r[0] for r in rows}
    sr = rt = sw = wt = 0
    for name, s_read, t_read, s_written, t_written in rows:
        if is_partition(name, names):
            continue
        sr += s_read
        rt += t_read
        sw += s_written
        wt += t_written
    return {
        "vDiskSectorReads": sr,
        "vDiskSectorWrites": sw,
        "vDiskReadTime": rt,
        "vDiskWriteTime": wt,
    }


def net_totals(doc):
    """net/dev: 2 header lines, then 'iface: rx ... (8 cols) tx ...'.
    Totals exclude the loopback interface. Any malformed row invalidates
    the whole read."""
    lines = doc.splitlines()
    if len(lines) < 2 or "bytes" not in lines[1]:
        return None
    rx_total = tx_total = 0
    for line in lines[2:]:
        if not line.strip():
            continue
        if ":" not in line:
            return None
        iface, rest = line.split(":", 1)
        cols = rest.split()
        if len(cols) < 9:
            return None
        if iface.strip() == "lo":
            continue
        rx_total += int(cols[0])
        tx_total += int(cols[8])
    return rx_total, tx_total


def host_memory(doc):
    out = {}
    keys = {"MemTotal": "vMemoryTotal", "MemFree": "vMemoryFree",
            "Buffers": "vMemoryBuffers", "Cached": "vMemoryCached"}
    for line in doc.splitlines():
        if ":" not in line:
            continue
        key, rest = line.split(":", 1)
        if key in keys:
            out[keys[key]] = int(rest.split()[0])
    return out


def host_section(proc):
    host = {}
    doc = read(os.path.join(proc, "stat"))
    if doc is not None:
        host.update(host_cpu(doc))
    doc = read(os.path.join(proc, "diskstats"))
    if doc is not None:
        host.update(host_disk(doc))
    doc = read(os.path.join(proc, "net", "dev"))
    if doc is not None:
        totals = net_totals(doc)
        if totals is not None:
            host["vNetworkBytesRecvd"], host["vNetworkBytesSent"] = totals
    doc = read(os.path.join(proc, "meminfo"))
    if doc is not None:
        host.update(host_memory(doc))
    doc = read(os.path.join(proc, "loadavg"))
    if doc is not None:
        cols = doc.split()
        if len(cols) >= 3:
            host["vLoadAvg"] = [float(cols[0]), float(cols[1]), float(cols[2])]
    doc = read(os.path.join(proc, "sys", "kernel", "hostname"))
    if doc is not None:
        host["vId"] = doc.strip()
    # fixed key order matching the document layout
    order = ["vCpuTimeUserMode", "vCpuTimeKernelMode", "vCpuIdleTime", "vCpuTimeIOWait",
             "vCpuContextSwitches", "vCpuNice", "vCpuSteal", "vDiskSectorReads",
             "vDiskSectorWrites", "vDiskReadTime", "vDiskWriteTime", "vNetworkBytesRecvd",
             "vNetworkBytesSent", "vMemoryTotal", "vMemoryFree", "vMemoryBuffers",
             "vMemoryCached", "vLoadAvg", "vId"]
    return {k: host[k] for k in order if k in host}


# --- container level --------------------------------------------------------

def container_section(proc, cgroup):
    c = {}
    doc = read(os.path.join(cgroup, "cpuacct", "cpuacct.stat"))
    if doc is not None:
        values = {}
        for line in doc.splitlines():
            cols = line.split()
            if len(cols) >= 2:
                values[cols[0]] = int(cols[1])
        if "user" in values and "system" in values:
            c["cCpuTimeUserMode"] = values["user"]
            c["cCpuTimeKernelMode"] = values["system"]
    doc = read(os.path.join(cgroup, "blkio", "blkio.sectors"))
    if doc is not None:
        total = 0
        for line in doc.splitlines():
            cols = line.split()
            if len(cols) == 2 and cols[0] != "Total" and cols[1].isdigit():
                total += int(cols[1])
        c["cDiskSectorIO"] = total
    doc = read(os.path.join(cgroup, "blkio", "blkio.throttle.io_service_bytes"))
    if doc is not None:
        read_bytes = write_bytes = 0
        for line in doc.splitlines():
            cols = line.split()
            if len(cols) != 3 or not cols[2].isdigit():
                continue
            if cols[1] == "Read":
                read_bytes += int(cols[2])
            elif cols[1] == "Write":
                write_bytes += int(cols[2])
        c["cDiskReadBytes"] = read_bytes
        c["cDiskWriteBytes"] = write_bytes
    doc = read(os.path.join(proc, "net", "dev"))
    if doc is not None:
        totals = net_totals(doc)
        if totals is not None:
            c["cNetworkBytesRecvd"], c["cNetworkBytesSent"] = totals
    doc = read(os.path.join(cgroup, "memory", "memory.usage_in_bytes"))
    if doc is not None and doc.strip().isdigit():
        c["cMemoryUsed"] = int(doc.strip())
    doc = read(os.path.join(proc, "self", "cgroup"))
    if doc is not None:
        lines = doc.splitlines()
        if lines:
            parts = lines[0].split(":", 2)
            if len(parts) == 3:
                segment = parts[2].rsplit("/", 1)[-1].strip()
                if segment:
                    c["cId"] = segment
    doc = read(os.path.join(cgroup, "cpuacct", "cgroup.procs"))
    if doc is not None:
        c["cNumProcesses"] = sum(1 for line in doc.splitlines() if line.strip())
    else:
        c["cNumProcesses"] = len(list_pids(proc))
    order = ["cCpuTimeUserMode", "cCpuTimeKernelMode", "cDiskSectorIO", "cDiskReadBytes",
             "cDiskWriteBytes", "cNetworkBytesRecvd", "cNetworkBytesSent", "cMemoryUsed",
             "cId", "cNumProcesses"]
    return {k: c[k] for k in order if k in c}


# --- process level ----------------------------------------------------------

def list_pids(proc):
    pids = []
    for name in os.listdir(proc):
        if name.isdigit():
            pids.append(int(name))
    return sorted(pids)


def process_section(proc):
    out = []
    for pid in list_pids(proc):
        doc = read(os.path.join(proc, str(pid), "stat"))
        if doc is None:
            continue  # vanished process
        line = doc.strip()
        open_paren = line.find("(")
        close_paren = line.rfind(")")
        if open_paren < 0 or close_paren < 0 or close_paren < open_paren:
            continue
        comm = line[open_paren + 1:close_paren]
        tail = line[close_paren + 1:].split()  # tail[0] is field 3
        if len(tail) < 22:  # needs at least field 24
            continue
        entry = {
            "pId": int(line[:open_paren].strip()),
            "pName": comm,
            "pCpuTimeUserMode": int(tail[14 - 3]),
            "pCpuTimeKernelMode": int(tail[15 - 3]),
        }
        status = read(os.path.join(proc, str(pid), "status"))
        if status is not None:
            for status_line in status.splitlines():
                if ":" not in status_line:
                    continue
                key, rest = status_line.split(":", 1)
                if key == "voluntary_ctxt_switches":
                    entry["pVoluntaryContextSwitches"] = int(rest.strip())
                elif key == "nonvoluntary_ctxt_switches":
                    entry["pNonvoluntaryContextSwitches"] = int(rest.strip())
        if len(tail) >= 40:  # field 42 present
            entry["pBlockIODelays"] = int(tail[42 - 3])
        entry["pResidentSetSize"] = int(tail[24 - 3])
        entry["pNumThreads"] = int(tail[20 - 3])
        order = ["pId", "pName", "pCpuTimeUserMode", "pCpuTimeKernelMode",
                 "pVoluntaryContextSwitches", "pNonvoluntaryContextSwitches",
                 "pBlockIODelays", "pResidentSetSize", "pNumThreads"]
        out.append({k: entry[k] for k in order if k in entry})
    return out


def expected_snapshot(scenario_dir):
    proc = os.path.join(scenario_dir, "proc")
    cgroup = os.path.join(scenario_dir, "cgroup")
    snap = {
        "wallClock": WALL_CLOCK,
        "monotonicClock": MONO_CLOCK,
        "sectionTimestamps": {
            "host": MONO_CLOCK,
            "container": MONO_CLOCK,
            "process": MONO_CLOCK,
        },
        "host": host_section(proc),
        "container": container_section(proc, cgroup),
        "processes": process_section(proc),
        "collectionDuration": 0,
    }
    return snap


def write_expected():
    for name in sorted(os.listdir(FIXTURES)):
        scenario = os.path.join(FIXTURES, name)
        if not os.path.isdir(scenario):
            continue
        if name == "cgroup-v2":
            continue  # the collector refuses this tree outright
        snap = expected_snapshot(scenario)
        with open(os.path.join(scenario, "expected.json"), "w") as fh:
            json.dump(snap, fh, indent=2)
            fh.write("\n")
        print("wrote", os.path.join(scenario, "expected.json"))


# --- delta CSV expectations -------------------------------------------------

def load_run(run_dir):
    snaps = []
    for name in os.listdir(run_dir):
        if not name.endswith(".json"):
            continue
        if name in ("run_metadata.json", "sampler_report.json", "run_result.json"):
            continue
        with open(os.path.join(run_dir, name)) as fh:
            snaps.append(json.load(fh))
    snaps.sort(key=lambda s: s["monotonicClock"])
    with open(os.path.join(run_dir, "run_metadata.json")) as fh:
        metadata = json.load(fh)
    return metadata, snaps


def bucket_ends(snaps, target):
    """Last snapshot of each occupied bucket k = ceil((t - t0)/target),
    with a small epsilon so boundary samples stay in the earlier bucket."""
    t0 = snaps[0]["wallClock"]
    ends = []
    current = None
    for snap in snaps:
        k = math.ceil((snap["wallClock"] - t0) / target - 1e-9)
        if k == current:
            ends[-1] = snap
        else:
            ends.append(snap)
            current = k
    return ends


def fmt(v):
    if v is None:
        return ""
    if float(v) == int(v) and abs(v) < 2 ** 53:
        return str(int(v))
    return "%.6f" % v


def deltas_csv(run_dir, target):
    """Expected CSV for the series subset used by the analysis golden test:
    vCpuTimeUserMode (counter delta), vBytesWritten (sector-write delta times
    the sector size), vMemoryUsed (total minus free, raw)."""
    metadata, snaps = load_run(run_dir)
    sector_size = metadata["sectorSizeBytes"]
    ends = bucket_ends(snaps, target)

    rows = {}
    prev_user = prev_sectors = None
    for snap in ends:
        ts = snap["wallClock"]
        rows.setdefault(ts, {})
        host = snap.get("host", {})
        user = host.get("vCpuTimeUserMode")
        if user is not None:
            if prev_user is not None:
                rows[ts]["vCpuTimeUserMode"] = user - prev_user
            prev_user = user
        sectors = host.get("vDiskSectorWrites")
        if sectors is not None:
            if prev_sectors is not None:
                rows[ts]["vBytesWritten"] = (sectors - prev_sectors) * sector_size
            prev_sectors = sectors
        if "vMemoryTotal" in host and "vMemoryFree" in host:
            rows[ts]["vMemoryUsed"] = host["vMemoryTotal"] - host["vMemoryFree"]

    columns = ["vCpuTimeUserMode", "vBytesWritten", "vMemoryUsed"]
    out = "timestamp," + ",".join(columns) + "\n"
    for ts in sorted(rows):
        cells = [fmt(rows[ts].get(col)) for col in columns]
        out += fmt(ts) + "," + ",".join(cells) + "\n"
    return out


def write_deltas():
    run_dir = os.path.join(GOLDEN, "run_basic")
    for target, name in [(1.0, "deltas_t1.csv"), (2.0, "deltas_t2.csv")]:
        path = os.path.join(GOLDEN, name)
        with open(path, "w") as fh:
            fh.write(deltas_csv(run_dir, target))
        print("wrote", path)


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "all"
    if mode in ("expected", "all"):
        write_expected()
    if mode in ("deltas", "all"):
        write_deltas()


if __name__ == "__main__":
    main()
