// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Clock abstraction. The sampler schedules against an injected clock so that
// scheduling behavior is testable without real sleeps; production code uses
// SystemClock, tests substitute a fake.

#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace resprof {

/// Time source and sleep facility used by the sampling loop.
/// monotonic_ns never goes backwards; wall_epoch_ns is Unix epoch time.
class Clock {
public:
    virtual ~Clock() = default;

    /// Monotonic reading in nanoseconds. Only differences are meaningful.
    virtual std::int64_t monotonic_ns() = 0;

    /// Wall-clock reading as nanoseconds since the Unix epoch.
    virtual std::int64_t wall_epoch_ns() = 0;

    /// Block the calling thread for approximately ns nanoseconds.
    virtual void sleep_ns(std::int64_t ns) = 0;
};

/// Real clocks: steady_clock for monotonic, system_clock for wall time.
class SystemClock final : public Clock {
public:
    std::int64_t monotonic_ns() override {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }

    std::int64_t wall_epoch_ns() override {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }

    void sleep_ns(std::int64_t ns) override {
        if (ns > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(ns));
    }
};

/// Convert an epoch-nanosecond wall reading to fractional epoch seconds for
/// the snapshot wallClock field.
inline double wall_ns_to_seconds(std::int64_t wall_ns) {
    return static_cast<double>(wall_ns) / 1e9;
}

} // namespace resprof
