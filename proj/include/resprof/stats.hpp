// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0
//
// Small numeric summaries: nearest-rank percentiles, collection-latency
// statistics for the sampler's self report, and the paired-run overhead
// calculation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "resprof/error.hpp"

namespace resprof {

/// Nearest-rank percentile over an ascending-sorted sample: the value at
/// 1-based rank ceil(p/100 * N), clamped into [1, N]. p is in [0, 100].
inline std::int64_t percentile_nearest_rank(const std::vector<std::int64_t>& sorted, double p) {
    if (sorted.empty()) throw ConfigError("percentile of empty sample");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    if (rank < 1) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

/// Mean of a sample.
inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw ConfigError("mean of empty sample");
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two points.
inline double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double sq = 0;
    for (double x : xs) sq += (x - m) * (x - m);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

/// Summary of per-snapshot collection latencies, all in nanoseconds.
/// subSecondFraction is the share of samples that completed in strictly
/// under one second.
struct CollectionLatencyStats {
    std::size_t count = 0;
    std::int64_t min_ns = 0;
    std::int64_t max_ns = 0;
    double mean_ns = 0.0;
    std::int64_t p50_ns = 0;
    std::int64_t p90_ns = 0;
    std::int64_t p99_ns = 0;
    double sub_second_fraction = 0.0;

    bool operator==(const CollectionLatencyStats&) const = default;
};

inline CollectionLatencyStats latency_stats(const std::vector<std::int64_t>& samples_ns) {
    CollectionLatencyStats out;
    out.count = samples_ns.size();
    if (samples_ns.empty()) return out;
    std::vector<std::int64_t> sorted = samples_ns;
    std::sort(sorted.begin(), sorted.end());
    out.min_ns = sorted.front();
    out.max_ns = sorted.back();
    double sum = 0;
    std::size_t sub_second = 0;
    for (std::int64_t s : samples_ns) {
        sum += static_cast<double>(s);
        if (s < 1'000'000'000) ++sub_second;
    }
    out.mean_ns = sum / static_cast<double>(samples_ns.size());
    out.p50_ns = percentile_nearest_rank(sorted, 50.0);
    out.p90_ns = percentile_nearest_rank(sorted, 90.0);
    out.p99_ns = percentile_nearest_rank(sorted, 99.0);
    out.sub_second_fraction = static_cast<double>(sub_second) / static_cast<double>(samples_ns.size());
    return out;
}

/// One power-of-two latency bucket covering [lower_ns, upper_ns).
struct HistogramBucket {
    std::int64_t lower_ns = 0;
    std::int64_t upper_ns = 0;
    std::size_t count = 0;

    bool operator==(const HistogramBucket&) const = default;
};

/// Power-of-two histogram of latencies. Buckets span from the smallest to
/// the largest occupied exponent; sub-1ns readings are clamped into the
/// first bucket.
inline std::vector<HistogramBucket> latency_histogram(const std::vector<std::int64_t>& samples_ns) {
    std::vector<HistogramBucket> out;
    if (samples_ns.empty()) return out;
    auto exponent = [](std::int64_t ns) {
        int e = 0;
        std::int64_t v = ns < 1 ? 1 : ns;
        while (v > 1) {
            v >>= 1;
            ++e;
        }
        return e;
    };
    int lo = exponent(samples_ns.front());
    int hi = lo;
    for (std::int64_t s : samples_ns) {
        lo = std::min(lo, exponent(s));
        hi = std::max(hi, exponent(s));
    }
    out.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int e = lo; e <= hi; ++e) {
        out[static_cast<std::size_t>(e - lo)].lower_ns = std::int64_t{1} << e;
        out[static_cast<std::size_t>(e - lo)].upper_ns = std::int64_t{1} << (e + 1);
    }
    for (std::int64_t s : samples_ns) ++out[static_cast<std::size_t>(exponent(s) - lo)].count;
    return out;
}

/// Paired-run overhead: how much longer the profiled runs took relative to
/// the baseline runs, as a percentage of the baseline mean. Negative values
/// mean the profiled runs were faster (noise).
struct OverheadResult {
    double baseline_mean = 0.0;
    double baseline_stddev = 0.0;
    double profiled_mean = 0.0;
    double profiled_stddev = 0.0;
    double overhead_percent = 0.0;

    bool operator==(const OverheadResult&) const = default;
};

inline OverheadResult compute_overhead(const std::vector<double>& baseline_seconds,
                                       const std::vector<double>& profiled_seconds) {
    if (baseline_seconds.empty()) throw ConfigError("overhead: no baseline runs");
    if (profiled_seconds.empty()) throw ConfigError("overhead: no profiled runs");
    OverheadResult out;
    out.baseline_mean = mean_of(baseline_seconds);
    out.baseline_stddev = sample_stddev(baseline_seconds);
    out.profiled_mean = mean_of(profiled_seconds);
    out.profiled_stddev = sample_stddev(profiled_seconds);
    if (out.baseline_mean == 0.0) throw ConfigError("overhead: baseline mean is zero");
    out.overhead_percent = (out.profiled_mean - out.baseline_mean) / out.baseline_mean * 100.0;
    return out;
}

} // namespace resprof
