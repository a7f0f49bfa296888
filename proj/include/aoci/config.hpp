#pragma once

// Full parameter set of one link instance, stored in SI units, plus the
// deterministic quantities derived from it once.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "aoci/channel.hpp"
#include "aoci/errors.hpp"
#include "aoci/optics.hpp"
#include "aoci/specfun/quadrature.hpp"
#include "aoci/specfun/series.hpp"

namespace aoci {

// Exact SI values (2019 redefinition).
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m / s

struct SourceParams {
    double power_tx = 0.0;  // optical transmit power [W]
    double lambda = 0.0;    // wavelength [m]
};

struct NeuralParams {
    double f0 = 0.0;    // background fluorescence rate [photons/s]
    double tau = 0.0;   // neuron time-decay constant [s]
    double y_th = 0.0;  // excitation threshold [photons per window]
    double d_th = 0.0;  // damage threshold [photons per window]; may be +inf

    [[nodiscard]] double background_mean() const noexcept { return f0 * tau; }
};

struct MpeLimits {
    double skin = 500e3;    // W/m^2 (500 mW/mm^2)
    double neuron = 75e3;   // W/m^2 (75 mW/mm^2)
};

struct Numerics {
    specfun::SeriesControl series;
    specfun::QuadControl quad;
};

struct LinkConfig {
    SourceParams source;
    channel::SkinParams skin;
    channel::BeamGeometry beam;
    optics::MemParams mem;
    optics::CouplingParams coupling;
    optics::FiberLoss fiber;
    NeuralParams neural;
    Numerics numerics;
    MpeLimits mpe;
    double skin_spot_radius = 0.0;  // emitted beam radius at the skin surface [m]
    double neuron_spot_radius = 0.0;  // illuminated disc on the neurons [m]; 0 selects omega0
    double hearing_target = 0.9;    // P_h needed inside the dynamic range
    bool signal_shot_noise = false;  // draw the signal count as Poisson too (extension)
};

struct ChannelState {
    double h_l = 0.0;
    channel::BeamStats beam;
    double g_c = 0.0;
    double k = 0.0;
    double coupling_argument = 0.0;
    double photons_per_joule = 0.0;  // lambda / (h c)
    double background_mean = 0.0;    // F0 tau
};

namespace detail {

inline void require(bool ok, const char* path, const char* message) {
    if (!ok) throw ConfigError(path, message);
}

}  // namespace detail

// Returns soft warnings; throws ConfigError on hard violations.
inline std::vector<std::string> validate(const LinkConfig& c) {
    using detail::require;
    std::vector<std::string> warnings;
    require(std::isfinite(c.source.power_tx) && c.source.power_tx >= 0.0, "source.power", "must be >= 0");
    require(c.source.lambda > 0.0 && std::isfinite(c.source.lambda), "source.lambda", "must be > 0");
    if (c.source.lambda < 300e-9 || c.source.lambda > 1000e-9) {
        warnings.push_back("source.lambda outside the 300-1000 nm range the model targets");
    }
    require(c.skin.delta > 0.0 && std::isfinite(c.skin.delta), "skin.delta", "must be > 0");
    if (c.skin.delta < 1e-3 || c.skin.delta > 2e-2) warnings.push_back("skin.delta outside 1-20 mm");
    require(c.skin.mu_a >= 0.0 && std::isfinite(c.skin.mu_a), "skin.mu_a", "must be >= 0");
    require(c.skin.mu_s >= 0.0 && std::isfinite(c.skin.mu_s), "skin.mu_s", "must be >= 0");
    require(c.beam.theta > 0.0 && c.beam.theta < std::numbers::pi, "beam.theta", "must lie in (0, 180) degrees");
    require(c.beam.beta > 0.0 && std::isfinite(c.beam.beta), "beam.beta", "must be > 0");
    require(c.beam.sigma_s > 0.0 && std::isfinite(c.beam.sigma_s), "beam.sigma_s", "must be > 0");
    require(c.mem.f > 0.0 && std::isfinite(c.mem.f), "mem.f", "must be > 0");
    require(c.mem.z0 > 0.0 && std::isfinite(c.mem.z0), "mem.z0", "must be > 0");
    require(c.mem.d_in >= 0.0 && std::isfinite(c.mem.d_in), "mem.d_in", "must be >= 0");
    require(c.coupling.D > 0.0 && std::isfinite(c.coupling.D), "coupling.D", "must be > 0");
    require(c.coupling.F > 0.0 && std::isfinite(c.coupling.F), "coupling.F", "must be > 0");
    require(c.coupling.omega0 > 0.0 && std::isfinite(c.coupling.omega0), "coupling.omega0", "must be > 0");
    require(c.coupling.lambda == c.source.lambda, "coupling.lambda", "must equal source.lambda");
    require(std::isfinite(optics::coupling_argument(c.coupling)), "coupling", "coupling argument is not finite");
    require(c.fiber.bend_db_per_90deg >= 0.0, "fiber.bend_db_per_90deg", "must be >= 0");
    require(c.fiber.n_quarter_turns >= 0.0, "fiber.n_quarter_turns", "must be >= 0");
    require(c.fiber.fbg_fraction_lost >= 0.0 && c.fiber.fbg_fraction_lost < 1.0, "fiber.fbg_fraction_lost",
            "must lie in [0, 1)");
    require(c.fiber.n_fbg >= 0, "fiber.n_fbg", "must be >= 0");
    require(c.neural.f0 >= 0.0 && std::isfinite(c.neural.f0), "neural.f0", "must be >= 0");
    require(c.neural.tau > 0.0 && std::isfinite(c.neural.tau), "neural.tau", "must be > 0");
    require(c.neural.y_th > 0.0 && std::isfinite(c.neural.y_th), "neural.y_th", "must be > 0");
    require(c.neural.d_th > c.neural.y_th, "neural.d_th", "must exceed neural.y_th");
    require(c.mpe.skin > 0.0, "mpe.skin", "must be > 0");
    require(c.mpe.neuron > 0.0, "mpe.neuron", "must be > 0");
    require(c.skin_spot_radius > 0.0 && std::isfinite(c.skin_spot_radius), "safety.skin_spot_radius", "must be > 0");
    require(c.neuron_spot_radius >= 0.0 && std::isfinite(c.neuron_spot_radius), "safety.neuron_spot_radius",
            "must be >= 0 (0 selects coupling.omega0)");
    require(c.hearing_target > 0.0 && c.hearing_target <= 1.0, "safety.hearing_target", "must lie in (0, 1]");
    try {
        c.numerics.series.validate();
        c.numerics.quad.validate();
    } catch (const DomainError& e) {
        throw ConfigError("numerics", e.what());
    }
    return warnings;
}

[[nodiscard]] inline ChannelState derive(const LinkConfig& c) {
    ChannelState s;
    s.h_l = channel::path_gain(c.skin);
    s.beam = channel::beam_stats(c.beam, c.skin.delta);
    s.g_c = optics::collimation_gain(c.mem);
    s.k = optics::fiber_efficiency(c.fiber);
    s.coupling_argument = optics::coupling_argument(c.coupling);
    s.photons_per_joule = c.source.lambda / (kPlanck * kSpeedOfLight);
    s.background_mean = c.neural.background_mean();
    return s;
}

}  // namespace aoci
