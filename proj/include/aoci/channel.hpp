#pragma once

// Transdermal channel: deterministic skin path gain and the stochastic
// geometric spread caused by radial pointing error.

#include <cmath>
#include <numbers>

#include "aoci/errors.hpp"
#include "aoci/specfun/special.hpp"

namespace aoci::channel {

struct SkinParams {
    double delta = 0.0;  // skin thickness [m]
    double mu_a = 0.0;   // attenuation coefficient [1/m]
    double mu_s = 0.0;   // scattering coefficient [1/m]
};

struct BeamGeometry {
    double theta = 0.0;    // full divergence angle [rad]
    double beta = 0.0;     // receiver aperture radius [m]
    double sigma_s = 0.0;  // pointing-error standard deviation [m]
};

struct BeamStats {
    double w_delta = 0.0;  // beam radius at the implant plane [m]
    double upsilon = 0.0;  // aperture-to-beam ratio
    double w_eq = 0.0;     // equivalent beam width [m]
    double a0 = 0.0;       // fraction collected at zero displacement
};

// h_l = exp(-(mu_a + mu_s) delta)
[[nodiscard]] inline double path_gain(const SkinParams& skin) {
    if (!(skin.mu_a >= 0.0) || !(skin.mu_s >= 0.0)) throw DomainError("path_gain: coefficients must be >= 0");
    if (!(skin.delta >= 0.0)) throw DomainError("path_gain: thickness must be >= 0");
    return std::exp(-(skin.mu_a + skin.mu_s) * skin.delta);
}

[[nodiscard]] inline BeamStats beam_stats(const BeamGeometry& geom, double delta) {
    if (!(geom.theta > 0.0 && geom.theta < std::numbers::pi)) throw DomainError("beam_stats: theta out of (0, pi)");
    if (!(geom.beta > 0.0)) throw DomainError("beam_stats: beta must be > 0");
    if (!(delta > 0.0)) throw DomainError("beam_stats: delta must be > 0");
    BeamStats s;
    s.w_delta = delta * std::tan(geom.theta / 2.0);
    s.upsilon = std::sqrt(std::numbers::pi) * geom.beta / (std::sqrt(2.0) * s.w_delta);
    const double e = specfun::erf(s.upsilon);
    // w_eq^2 = w_delta^2 sqrt(pi) erf(v) / (2 v exp(-v^2)), written with exp(+v^2)
    // so that large v does not underflow the denominator.
    const double v = s.upsilon;
    s.w_eq = s.w_delta * std::sqrt(std::sqrt(std::numbers::pi) * e * std::exp(v * v) / (2.0 * v));
    s.a0 = e * e;
    return s;
}

// h_p(r) = A0 exp(-2 r^2 / w_eq^2)
[[nodiscard]] inline double pointing_gain(const BeamStats& stats, double r) {
    if (!(r >= 0.0)) throw DomainError("pointing_gain: r must be >= 0");
    return stats.a0 * std::exp(-2.0 * r * r / (stats.w_eq * stats.w_eq));
}

[[nodiscard]] inline double pointing_gain(const BeamGeometry& geom, double delta, double r) {
    return pointing_gain(beam_stats(geom, delta), r);
}

// Rayleigh density of the radial displacement.
[[nodiscard]] inline double rayleigh_pdf(double sigma_s, double r) {
    if (!(sigma_s > 0.0)) throw DomainError("rayleigh_pdf: sigma_s must be > 0");
    if (!(r >= 0.0)) throw DomainError("rayleigh_pdf: r must be >= 0");
    const double s2 = sigma_s * sigma_s;
    return r / s2 * std::exp(-r * r / (2.0 * s2));
}

// Closed form of the pointing-gain average over the Rayleigh law:
//   int_0^inf h_p(r) f_r(r) dr = A0 w_eq^2 / (w_eq^2 + 4 sigma_s^2).
[[nodiscard]] inline double mean_pointing_gain(const BeamStats& stats, double sigma_s) {
    const double w2 = stats.w_eq * stats.w_eq;
    return stats.a0 * w2 / (w2 + 4.0 * sigma_s * sigma_s);
}

}  // namespace aoci::channel
