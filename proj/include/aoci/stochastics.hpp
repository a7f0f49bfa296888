#pragma once

// Seeded random variates for the Monte Carlo estimators.
//
// The generator is Philox4x32-10 (counter-based): the 64-bit seed is the key
// and the 128-bit counter holds (position, stream id), so any substream is
// addressable directly and results do not depend on how work is scheduled.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "aoci/errors.hpp"

namespace aoci::stochastics {

[[nodiscard]] inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                                             std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint64_t kM0 = 0xD2511F53u;
    constexpr std::uint64_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = kM0 * ctr[0];
        const std::uint64_t p1 = kM1 * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : seed_(seed), stream_id_(stream_id) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept {
        if (cursor_ >= 4) refill();
        const std::uint64_t hi = block_[cursor_++];
        const std::uint64_t lo = block_[cursor_++];
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    void refill() noexcept {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        block_ = philox4x32(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        ++position_;
        cursor_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int cursor_ = 4;
};

// r = sigma sqrt(-2 ln u), u in (0, 1); strictly positive.
[[nodiscard]] inline double sample_rayleigh(RngStream& stream, double sigma_s) {
    if (!(sigma_s > 0.0)) throw DomainError("sample_rayleigh: sigma_s must be > 0");
    return sigma_s * std::sqrt(-2.0 * std::log(stream.uniform_open()));
}

namespace detail {

inline std::int64_t poisson_inversion(RngStream& stream, double mean) noexcept {
    const double u = stream.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0) break;
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS).
inline std::int64_t poisson_ptrs(RngStream& stream, double mean) noexcept {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = stream.uniform() - 0.5;
        const double v = stream.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace detail

inline constexpr double kPoissonInversionLimit = 30.0;

[[nodiscard]] inline std::int64_t sample_poisson(RngStream& stream, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("sample_poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    return mean <= kPoissonInversionLimit ? detail::poisson_inversion(stream, mean) : detail::poisson_ptrs(stream, mean);
}

// Running mean/variance (Welford), mergeable in a fixed order.
struct Moments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Moments& other) noexcept {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double total = static_cast<double>(count + other.count);
        const double d = other.mean - mean;
        mean += d * static_cast<double>(other.count) / total;
        m2 += other.m2 + d * d * static_cast<double>(count) * static_cast<double>(other.count) / total;
        count += other.count;
    }

    [[nodiscard]] double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    [[nodiscard]] double standard_error() const noexcept {
        return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
};

// Sample budget is always split into this many partitions; partition p owns
// the stream ids [p * kStreamsPerPartition, (p + 1) * kStreamsPerPartition).
inline constexpr int kPartitions = 64;
inline constexpr std::uint64_t kStreamsPerPartition = 4;

[[nodiscard]] inline int default_workers() noexcept {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs `body(partition, count)` for every partition and returns the results
// in partition order. Partition sizes depend only on n.
template <class Result, class Body>
std::vector<Result> run_partitioned(std::int64_t n, int workers, Body&& body) {
    std::vector<Result> results(kPartitions);
    auto share = [n](int p) { return n / kPartitions + (p < n % kPartitions ? 1 : 0); };
    workers = std::clamp(workers, 1, kPartitions);
    if (workers == 1) {
        for (int p = 0; p < kPartitions; ++p) results[p] = body(p, share(p));
        return results;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int p = w; p < kPartitions; p += workers) results[p] = body(p, share(p));
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace aoci::stochastics
