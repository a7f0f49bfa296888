#pragma once

// Reference link: lens and fiber values from the published parameter table
// plus the calibration documented in presets/*/calibration.md. The bundled
// preset configs describe the same link.

#include <numbers>

#include "aoci/config.hpp"
#include "aoci/optics.hpp"
#include "aoci/photometry.hpp"

namespace aoci::reference {

// Coupling argument that maximises the on-axis coupling efficiency.
inline constexpr double kOptimalArgument = 1.2565;

[[nodiscard]] inline LinkConfig config() {
    LinkConfig c;
    c.source = {20e-3, 594e-9};
    c.skin = {6e-3, 0.035e3, 0.25e3};
    c.beam = {20.0 * std::numbers::pi / 180.0, 2.2e-3, 0.1e-3};
    c.mem = {5e-3, 5e-3, 3.363e-3};
    c.coupling = {0.1e-3, optics::focal_length_for_argument(0.1e-3, 0.1e-3, 594e-9, kOptimalArgument), 0.1e-3,
                  594e-9};
    c.fiber = {0.14, 1.0, 0.1, 1};
    // y_th: 1 mW at the fiber output accumulated over one response window.
    const double y_th = photometry::photon_flux(1e-3, 594e-9) * photometry::response_window_gain(0.15);
    c.neural = {10.0, 0.15, y_th, 1.75e17};
    c.skin_spot_radius = 1.066e-3;
    c.neuron_spot_radius = 1.0e-3;
    return c;
}

// Same link with the lens focal length chosen for a given coupling argument.
[[nodiscard]] inline LinkConfig with_argument(LinkConfig c, double a) {
    c.coupling.F = optics::focal_length_for_argument(c.coupling.D, c.coupling.omega0, c.coupling.lambda, a);
    return c;
}

}  // namespace aoci::reference
