#pragma once

// Probabilities of hearing, false hearing and neural damage, MPE verdicts,
// and the safe dynamic range of transmit power.
//
// All thresholds live in the count domain: the signal count over one
// response window is Phi(r) tau (e - 1)/e, compared against y_th or d_th
// together with the Poisson background count N.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "aoci/channel.hpp"
#include "aoci/config.hpp"
#include "aoci/errors.hpp"
#include "aoci/optics.hpp"
#include "aoci/photometry.hpp"
#include "aoci/specfun/special.hpp"
#include "aoci/stochastics.hpp"

namespace aoci::kpi {

struct ProbabilityEstimate {
    double value = 0.0;
    double ci_low = 0.0;   // 95% Wilson interval
    double ci_high = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct FalseHearing {
    double literal = 0.0;            // Pr(N >= y_th)
    double gamma_q_form = 0.0;  // Q(y_th + 1, B_bar), which is Pr(N <= y_th)
};

struct DynamicRange {
    double min_power = std::numeric_limits<double>::quiet_NaN();  // W
    double max_power = std::numeric_limits<double>::quiet_NaN();  // W
    bool empty = true;
};

struct SafetyReport {
    double skin_irradiance = 0.0;    // W/m^2
    double neuron_irradiance = 0.0;  // W/m^2
    bool mpe_skin_ok = true;
    bool mpe_neuron_ok = true;
    DynamicRange dynamic_range;
};

struct KpiReport {
    ProbabilityEstimate p_hearing;
    FalseHearing p_false_hearing;
    ProbabilityEstimate p_damage;
    SafetyReport safety;
};

inline constexpr std::int64_t kMinKpiSamples = 10000;

// Wilson score interval for k successes in n trials at 95%.
[[nodiscard]] inline ProbabilityEstimate wilson(std::int64_t k, std::int64_t n) {
    if (n <= 0 || k < 0 || k > n) throw DomainError("wilson: requires 0 <= k <= n, n > 0");
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
    ProbabilityEstimate out;
    out.value = p;
    out.ci_low = k == 0 ? 0.0 : std::max(0.0, centre - half);
    out.ci_high = k == n ? 1.0 : std::min(1.0, centre + half);
    out.n_samples = n;
    return out;
}

namespace detail {

inline ProbabilityEstimate certain(double value, std::int64_t n, std::uint64_t seed) {
    ProbabilityEstimate out;
    out.value = out.ci_low = out.ci_high = value;
    out.n_samples = n;
    out.seed = seed;
    return out;
}

}  // namespace detail

// Pr(signal count + N >= threshold) with r ~ Rayleigh(sigma_s) and
// N ~ Poisson(B_bar). Partition p draws r from stream 4p, N from 4p + 1 and,
// with signal shot noise enabled, the total count from 4p + 2. Sharing the
// seed across calls gives common random numbers.
[[nodiscard]] inline ProbabilityEstimate exceedance_probability(const LinkConfig& cfg, double threshold,
                                                                std::int64_t n, std::uint64_t seed,
                                                                const optics::CouplingProfile& profile,
                                                                int workers = stochastics::default_workers()) {
    if (n < kMinKpiSamples) throw DomainError("exceedance_probability: n must be >= 10000");
    if (std::isnan(threshold)) throw DomainError("exceedance_probability: threshold is NaN");
    if (threshold <= 0.0) return detail::certain(1.0, n, seed);
    if (std::isinf(threshold)) return detail::certain(0.0, n, seed);

    const ChannelState st = derive(cfg);
    const double count_factor = photometry::static_flux_factor(cfg, st) * photometry::response_window_gain(cfg.neural.tau);
    const double sigma = cfg.beam.sigma_s;
    const double background = st.background_mean;
    const bool shot_noise = cfg.signal_shot_noise;
    using stochastics::kStreamsPerPartition;

    auto hits = stochastics::run_partitioned<std::int64_t>(n, workers, [&](int p, std::int64_t count) {
        const std::uint64_t base = static_cast<std::uint64_t>(p) * kStreamsPerPartition;
        stochastics::RngStream radial(seed, base);
        stochastics::RngStream noise(seed, base + 1);
        stochastics::RngStream shot(seed, base + 2);
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < count; ++i) {
            const double r = stochastics::sample_rayleigh(radial, sigma);
            const double signal =
                count_factor == 0.0 ? 0.0 : count_factor * profile(r) * channel::pointing_gain(st.beam, r);
            double total = 0.0;
            if (shot_noise) {
                total = static_cast<double>(stochastics::sample_poisson(shot, signal + background));
            } else {
                total = signal + static_cast<double>(stochastics::sample_poisson(noise, background));
            }
            if (total >= threshold) ++k;
        }
        return k;
    });
    std::int64_t k = 0;
    for (auto h : hits) k += h;
    ProbabilityEstimate out = wilson(k, n);
    out.seed = seed;
    return out;
}

[[nodiscard]] inline ProbabilityEstimate p_hearing(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                                   const optics::CouplingProfile& profile,
                                                   int workers = stochastics::default_workers()) {
    return exceedance_probability(cfg, cfg.neural.y_th, n, seed, profile, workers);
}

[[nodiscard]] inline ProbabilityEstimate p_hearing(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed) {
    if (n < kMinKpiSamples) throw DomainError("p_hearing: n must be >= 10000");
    return p_hearing(cfg, n, seed, photometry::make_profile(cfg));
}

// Approximation that drops the background branch, valid because N << d_th.
[[nodiscard]] inline ProbabilityEstimate p_damage(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                                  const optics::CouplingProfile& profile,
                                                  int workers = stochastics::default_workers()) {
    return exceedance_probability(cfg, cfg.neural.d_th, n, seed, profile, workers);
}

[[nodiscard]] inline ProbabilityEstimate p_damage(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed) {
    if (n < kMinKpiSamples) throw DomainError("p_damage: n must be >= 10000");
    if (std::isinf(cfg.neural.d_th)) return detail::certain(0.0, n, seed);
    return p_damage(cfg, n, seed, photometry::make_profile(cfg));
}

// A non-integer threshold is reached by the first integer count at or above it.
[[nodiscard]] inline FalseHearing p_false_hearing(const NeuralParams& np) {
    if (!(np.y_th >= 0.0) || std::isinf(np.y_th)) throw DomainError("p_false_hearing: y_th must be finite and >= 0");
    const double b = np.background_mean();
    const double k = std::ceil(np.y_th);
    FalseHearing out;
    out.literal = k == 0.0 ? 1.0 : specfun::regularized_gamma_p(k, b);
    out.gamma_q_form = specfun::regularized_gamma_q(np.y_th + 1.0, b);
    return out;
}

// Power reaching the neurons per watt transmitted, on axis (worst case).
[[nodiscard]] inline double neuron_power_gain(const LinkConfig& cfg) {
    const ChannelState st = derive(cfg);
    const double eta0 = optics::coupling_eta(cfg.coupling, 0.0, cfg.numerics.series, cfg.numerics.quad);
    return st.k * st.g_c * st.h_l * eta0 * channel::pointing_gain(st.beam, 0.0);
}

[[nodiscard]] inline double skin_irradiance(const LinkConfig& cfg) {
    return cfg.source.power_tx / (std::numbers::pi * cfg.skin_spot_radius * cfg.skin_spot_radius);
}

[[nodiscard]] inline double neuron_spot_radius(const LinkConfig& cfg) {
    return cfg.neuron_spot_radius > 0.0 ? cfg.neuron_spot_radius : cfg.coupling.omega0;
}

[[nodiscard]] inline double neuron_irradiance(const LinkConfig& cfg) {
    const double w = neuron_spot_radius(cfg);
    return neuron_power_gain(cfg) * cfg.source.power_tx / (std::numbers::pi * w * w);
}

// Largest transmit power that keeps both irradiances within their MPE.
[[nodiscard]] inline double max_safe_power(const LinkConfig& cfg) {
    const double skin_limit = cfg.mpe.skin * std::numbers::pi * cfg.skin_spot_radius * cfg.skin_spot_radius;
    const double gain = neuron_power_gain(cfg);
    const double w = neuron_spot_radius(cfg);
    const double neuron_limit =
        gain > 0.0 ? cfg.mpe.neuron * std::numbers::pi * w * w / gain : std::numeric_limits<double>::infinity();
    return std::min(skin_limit, neuron_limit);
}

// Power interval where P_h >= hearing_target and both MPE verdicts pass.
// P_h is nondecreasing in power under common random numbers, so the lower
// end is found by bisection in log power.
[[nodiscard]] inline DynamicRange dynamic_range(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                                const optics::CouplingProfile& profile,
                                                int workers = stochastics::default_workers()) {
    DynamicRange out;
    const double hi = max_safe_power(cfg);
    out.max_power = hi;
    if (!std::isfinite(hi)) return out;
    auto hearing_at = [&](double power) {
        LinkConfig c = cfg;
        c.source.power_tx = power;
        return p_hearing(c, n, seed, profile, workers).value;
    };
    if (hearing_at(hi) < cfg.hearing_target) return out;
    out.empty = false;
    if (hearing_at(0.0) >= cfg.hearing_target) {
        out.min_power = 0.0;
        return out;
    }
    double lo_log = std::log(hi) - std::log(1e12);
    double hi_log = std::log(hi);
    if (hearing_at(std::exp(lo_log)) >= cfg.hearing_target) {
        out.min_power = std::exp(lo_log);
        return out;
    }
    for (int i = 0; i < 48; ++i) {
        const double mid = 0.5 * (lo_log + hi_log);
        if (hearing_at(std::exp(mid)) >= cfg.hearing_target) {
            hi_log = mid;
        } else {
            lo_log = mid;
        }
    }
    out.min_power = std::min(std::exp(hi_log), hi);
    return out;
}

[[nodiscard]] inline SafetyReport safety_check(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                               const optics::CouplingProfile& profile,
                                               int workers = stochastics::default_workers()) {
    SafetyReport out;
    out.skin_irradiance = skin_irradiance(cfg);
    out.neuron_irradiance = neuron_irradiance(cfg);
    out.mpe_skin_ok = out.skin_irradiance <= cfg.mpe.skin;
    out.mpe_neuron_ok = out.neuron_irradiance <= cfg.mpe.neuron;
    out.dynamic_range = dynamic_range(cfg, n, seed, profile, workers);
    return out;
}

[[nodiscard]] inline SafetyReport safety_check(const LinkConfig& cfg, std::int64_t n = kMinKpiSamples,
                                               std::uint64_t seed = 42) {
    return safety_check(cfg, n, seed, photometry::make_profile(cfg));
}

[[nodiscard]] inline KpiReport evaluate(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                        int workers = stochastics::default_workers()) {
    if (n < kMinKpiSamples) throw DomainError("kpi::evaluate: n must be >= 10000");
    const auto profile = photometry::make_profile(cfg);
    KpiReport out;
    out.p_hearing = p_hearing(cfg, n, seed, profile, workers);
    out.p_false_hearing = p_false_hearing(cfg.neural);
    out.p_damage = p_damage(cfg, n, seed, profile, workers);
    out.safety = safety_check(cfg, n, seed, profile, workers);
    return out;
}

}  // namespace aoci::kpi
