#pragma once

// Signal chain from transmitter to cochlear neurons, photon-flux conversion,
// background shot noise, and the average photon flux over pointing error
// evaluated three ways (quadruple series, quadrature, Monte Carlo).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "aoci/channel.hpp"
#include "aoci/config.hpp"
#include "aoci/errors.hpp"
#include "aoci/optics.hpp"
#include "aoci/specfun/quadrature.hpp"
#include "aoci/specfun/series.hpp"
#include "aoci/stochastics.hpp"

namespace aoci::photometry {

enum class Method { series, quadrature, monte_carlo };

[[nodiscard]] inline std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::series: return "series";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<Method> parse_method(std::string_view s) noexcept {
    if (s == "series") return Method::series;
    if (s == "quadrature") return Method::quadrature;
    if (s == "mc" || s == "monte_carlo") return Method::monte_carlo;
    return std::nullopt;
}

struct FluxEstimate {
    double value = 0.0;      // photons/s
    Method method = Method::quadrature;
    double err_bound = 0.0;  // truncation bound, quadrature error, or standard error
    std::optional<std::int64_t> n_samples;
    std::optional<std::uint64_t> seed;
    std::string note;  // set when an automatic fallback produced the value
};

// Linear part of the chain that does not depend on r: k G_c h_l (lambda/hc) x.
[[nodiscard]] inline double static_flux_factor(const LinkConfig& cfg, const ChannelState& st) {
    return st.k * st.g_c * st.h_l * st.photons_per_joule * cfg.source.power_tx;
}

// Phi(r) = k eta(r) G_c h_l h_p(r) (lambda / h c) x
[[nodiscard]] inline double received_flux_at(double r, const LinkConfig& cfg, const ChannelState& st) {
    if (!(r >= 0.0)) throw DomainError("received_flux_at: r must be >= 0");
    const double factor = static_flux_factor(cfg, st);
    if (factor == 0.0) return 0.0;
    const double eta = optics::coupling_eta(cfg.coupling, r, cfg.numerics.series, cfg.numerics.quad);
    return factor * eta * channel::pointing_gain(st.beam, r);
}

[[nodiscard]] inline double received_flux_at(double r, const LinkConfig& cfg) {
    return received_flux_at(r, cfg, derive(cfg));
}

// Photon flux for an optical power at the fiber output.
[[nodiscard]] inline double photon_flux(double optical_power, double lambda) noexcept {
    return lambda / (kPlanck * kSpeedOfLight) * optical_power;
}

namespace detail {

// 2/omega0^2 + 2/w_eq^2 + 1/(2 sigma_s^2): Gaussian rate of the r-integrand.
inline double gaussian_rate(const LinkConfig& cfg, const ChannelState& st) {
    const double w0 = cfg.coupling.omega0;
    const double weq = st.beam.w_eq;
    const double sig = cfg.beam.sigma_s;
    return 2.0 / (w0 * w0) + 2.0 / (weq * weq) + 1.0 / (2.0 * sig * sig);
}

}  // namespace detail

// Phi_bar = k G_c h_l lambda x A0 (2a) / (2 h c sigma_s^2 S) * F4(-a, -a, y, y),
// S = 2/omega0^2 + 2/w_eq^2 + 1/(2 sigma_s^2), y = (1/omega0^2) / S.
[[nodiscard]] inline FluxEstimate mean_flux_series(const LinkConfig& cfg, const specfun::SeriesControl& ctl) {
    const ChannelState st = derive(cfg);
    const double factor = static_flux_factor(cfg, st);
    FluxEstimate out;
    out.method = Method::series;
    if (factor == 0.0) return out;
    const double a = st.coupling_argument;
    const double rate = detail::gaussian_rate(cfg, st);
    const double w0 = cfg.coupling.omega0;
    const double y = 1.0 / (w0 * w0 * rate);
    const double sig2 = cfg.beam.sigma_s * cfg.beam.sigma_s;
    const double prefactor = factor * st.beam.a0 * 2.0 * a / (2.0 * sig2 * rate);
    try {
        const auto series = specfun::f4_general(-a, -a, y, y, ctl);
        out.value = prefactor * series.value;
        out.err_bound = prefactor * series.error;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + "; fall back to mean_flux_quadrature",
                               prefactor * e.best_estimate(), prefactor * e.achieved_error());
    } catch (const PrecisionLossError& e) {
        throw PrecisionLossError(std::string(e.what()) + "; fall back to mean_flux_quadrature",
                                 prefactor * e.best_estimate(), prefactor * e.achieved_error());
    }
    return out;
}

// Phi_bar = int_0^inf Phi(r) f_r(r) dr
[[nodiscard]] inline FluxEstimate mean_flux_quadrature(const LinkConfig& cfg, const specfun::QuadControl& ctl) {
    const ChannelState st = derive(cfg);
    FluxEstimate out;
    out.method = Method::quadrature;
    if (static_flux_factor(cfg, st) == 0.0) return out;
    const double sigma = cfg.beam.sigma_s;
    auto integrand = [&](double r) {
        return received_flux_at(r, cfg, st) * channel::rayleigh_pdf(sigma, r);
    };
    // Peak of r exp(-c r^2) with c = 2/w_eq^2 + 1/(2 sigma^2).
    const double weq = st.beam.w_eq;
    const double c = 2.0 / (weq * weq) + 1.0 / (2.0 * sigma * sigma);
    const double scale = 1.0 / std::sqrt(2.0 * c);
    // eta varies on the omega0 scale; seed panels geometrically from there.
    std::vector<double> breaks;
    for (double b = 0.5 * cfg.coupling.omega0; b < ctl.tail_cutoff_sigmas * scale; b *= 2.0) breaks.push_back(b);
    const auto q = specfun::integrate_semi_infinite(integrand, scale, ctl, breaks);
    out.value = q.value;
    out.err_bound = q.error;
    return out;
}

// Probability mass beyond r_max under the Rayleigh law is exp(-r^2/(2 sigma^2)).
[[nodiscard]] inline double profile_radius(double sigma_s) { return sigma_s * std::sqrt(2.0 * std::log(1e16)); }

[[nodiscard]] inline optics::CouplingProfile make_profile(const LinkConfig& cfg) {
    return optics::CouplingProfile(cfg.coupling, profile_radius(cfg.beam.sigma_s), cfg.numerics.series,
                                   cfg.numerics.quad);
}

// Sample mean of Phi(r_i), r_i ~ Rayleigh(sigma_s). Partition p draws its
// displacements from stream p * kStreamsPerPartition.
[[nodiscard]] inline FluxEstimate mean_flux_mc(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                               const optics::CouplingProfile& profile,
                                               int workers = stochastics::default_workers()) {
    if (n < 1000) throw DomainError("mean_flux_mc: n must be >= 1000");
    const ChannelState st = derive(cfg);
    const double factor = static_flux_factor(cfg, st);
    const double sigma = cfg.beam.sigma_s;
    auto parts = stochastics::run_partitioned<stochastics::Moments>(n, workers, [&](int p, std::int64_t count) {
        stochastics::RngStream stream(seed, static_cast<std::uint64_t>(p) * stochastics::kStreamsPerPartition);
        stochastics::Moments m;
        for (std::int64_t i = 0; i < count; ++i) {
            const double r = stochastics::sample_rayleigh(stream, sigma);
            m.add(factor == 0.0 ? 0.0 : factor * profile(r) * channel::pointing_gain(st.beam, r));
        }
        return m;
    });
    stochastics::Moments total;
    for (const auto& m : parts) total.merge(m);
    FluxEstimate out;
    out.method = Method::monte_carlo;
    out.value = total.mean;
    out.err_bound = total.standard_error();
    out.n_samples = n;
    out.seed = seed;
    return out;
}

[[nodiscard]] inline FluxEstimate mean_flux_mc(const LinkConfig& cfg, std::int64_t n, std::uint64_t seed,
                                               int workers = stochastics::default_workers()) {
    if (n < 1000) throw DomainError("mean_flux_mc: n must be >= 1000");
    return mean_flux_mc(cfg, n, seed, make_profile(cfg), workers);
}

struct McOptions {
    std::int64_t samples = 1000000;
    std::uint64_t seed = 42;
    int workers = stochastics::default_workers();
};

// Dispatches on method. In non-strict mode a failing series falls back to
// quadrature and records the fallback in `note`.
[[nodiscard]] inline FluxEstimate mean_flux(const LinkConfig& cfg, Method method, const McOptions& mc = {},
                                            bool strict = false) {
    switch (method) {
        case Method::series:
            try {
                return mean_flux_series(cfg, cfg.numerics.series);
            } catch (const NumericalError& e) {
                if (strict) throw;
                FluxEstimate q = mean_flux_quadrature(cfg, cfg.numerics.quad);
                q.note = std::string("series failed (") + e.what() + "); value from quadrature";
                return q;
            }
        case Method::quadrature: return mean_flux_quadrature(cfg, cfg.numerics.quad);
        case Method::monte_carlo: return mean_flux_mc(cfg, mc.samples, mc.seed, mc.workers);
    }
    throw DomainError("mean_flux: unknown method");
}

// tau (e - 1) / e: integral of exp(-t/tau) over one relaxation window.
[[nodiscard]] inline double response_window_gain(double tau) {
    if (!(tau > 0.0)) throw DomainError("response_window_gain: tau must be > 0");
    return tau * (std::numbers::e - 1.0) / std::numbers::e;
}

// Y1_bar = Phi_bar tau (e - 1)/e + B_bar, in photons per window.
[[nodiscard]] inline double link_budget(double mean_flux, const NeuralParams& np) {
    return mean_flux * response_window_gain(np.tau) + np.background_mean();
}

// Poisson pmf of the background count with mean F0 tau.
[[nodiscard]] inline double background_pmf(const NeuralParams& np, std::int64_t n) {
    if (n < 0) throw DomainError("background_pmf: n must be >= 0");
    const double mean = np.background_mean();
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    const double k = static_cast<double>(n);
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

}  // namespace aoci::photometry
