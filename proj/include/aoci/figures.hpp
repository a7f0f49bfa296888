#pragma once

// Bundled figure presets and the scale-free trends each figure is expected
// to show. Relative changes follow the convention of the reference
// discussion: the change is measured against the larger of the two values.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aoci/config_io.hpp"
#include "aoci/kpi.hpp"
#include "aoci/photometry.hpp"
#include "aoci/sweep.hpp"

namespace aoci::figures {

inline constexpr int kFirst = 3;
inline constexpr int kLast = 8;

struct TrendCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0;  // accepted band
    double hi = 0.0;
    std::string reference;  // what the trend is compared with
    bool ok = false;
};

struct Preset {
    LinkConfig config;
    sweep::SweepSpec sweep;
};

[[nodiscard]] inline std::string preset_dir(int n, const std::string& root = AOCI_PRESET_DIR) {
    return root + "/fig" + std::to_string(n);
}

[[nodiscard]] inline Preset load_preset(int n, const std::string& root = AOCI_PRESET_DIR) {
    if (n < kFirst || n > kLast) throw DomainError("figure number must lie in 3..8");
    const std::string dir = preset_dir(n, root);
    return {config_io::load(dir + "/config.json"), sweep::load_spec(dir + "/sweep.json")};
}

[[nodiscard]] inline double change_vs_larger(double a, double b) { return std::fabs(a - b) / std::max(a, b); }

namespace detail {

inline double flux(LinkConfig c, const char* path, double v) {
    config_io::set_parameter(c, path, v);
    return photometry::mean_flux_quadrature(c, c.numerics.quad).value;
}

inline double flux(LinkConfig c, const char* p1, double v1, const char* p2, double v2) {
    config_io::set_parameter(c, p1, v1);
    return flux(c, p2, v2);
}

inline TrendCheck band(std::string name, double value, double lo, double hi, std::string reference) {
    return {std::move(name), value, lo, hi, std::move(reference), value >= lo && value <= hi};
}

inline std::int64_t kpi_samples(const Preset& p) { return std::max(p.sweep.samples, kpi::kMinKpiSamples); }

}  // namespace detail

// Trend checks for figure n evaluated on its preset configuration.
[[nodiscard]] inline std::vector<TrendCheck> trend_checks(int n, const Preset& p) {
    using detail::band;
    using detail::flux;
    const LinkConfig& c = p.config;
    std::vector<TrendCheck> out;
    switch (n) {
        case 3: {
            const double d6 = flux(c, "beam.theta_deg", 20, "skin.delta_mm", 6);
            const double d8 = flux(c, "beam.theta_deg", 20, "skin.delta_mm", 8);
            out.push_back(band("flux change, delta 8 -> 6 mm at theta 20 deg", change_vs_larger(d6, d8), 0.39, 0.49,
                               "about 44%"));
            const double t30 = flux(c, "skin.delta_mm", 6, "beam.theta_deg", 30);
            out.push_back(band("flux change, theta 30 -> 20 deg at delta 6 mm", change_vs_larger(d6, t30), 0.0, 0.06,
                               "about 3%"));
            break;
        }
        case 4: {
            const double p20 = flux(c, "skin.delta_mm", 6, "source.power_mw", 20);
            const double p10 = flux(c, "skin.delta_mm", 6, "source.power_mw", 10);
            out.push_back(band("flux change, power 20 -> 10 mW at delta 6 mm", change_vs_larger(p20, p10), 0.46, 0.52,
                               "about 49%"));
            break;
        }
        case 5: {
            const double s01 = flux(c, "beam.sigma_s_mm", 0.1);
            const double s1 = flux(c, "beam.sigma_s_mm", 1.0);
            out.push_back(band("flux ratio sigma 1 mm / 0.1 mm at 40 mW, delta 6 mm", s1 / s01, 0.01, 0.05,
                               "0.0144 (7.13e15 -> 1.03e14)"));
            out.push_back(band("flux at sigma 0.1 mm [photons/s]", s01, 7.13e15 * 0.95, 7.13e15 * 1.05,
                               "7.13e15 (calibration anchor)"));
            break;
        }
        case 6: {
            const double s01 = flux(c, "beam.sigma_s_mm", 0.1);
            const double s05 = flux(c, "beam.sigma_s_mm", 0.5);
            out.push_back(band("flux ratio sigma 0.1 mm / 0.5 mm at 20 mW", s01 / s05, 10.0, INFINITY,
                               ">= 16.7 (increase of about 94%)"));
            const double s001 = flux(c, "beam.sigma_s_mm", 0.01);
            const double s005 = flux(c, "beam.sigma_s_mm", 0.05);
            out.push_back(band("flux change, sigma 0.05 -> 0.01 mm at 20 mW", change_vs_larger(s001, s005), 0.3, 0.6,
                               "about 45%"));
            break;
        }
        case 7: {
            const auto profile = optics::CouplingProfile(c.coupling, photometry::profile_radius(0.5e-3),
                                                         c.numerics.series, c.numerics.quad);
            const auto ns = detail::kpi_samples(p);
            auto ph = [&](double sigma_mm, double power_mw) {
                LinkConfig k = c;
                config_io::set_parameter(k, "beam.sigma_s_mm", sigma_mm);
                config_io::set_parameter(k, "source.power_mw", power_mw);
                return kpi::p_hearing(k, ns, p.sweep.seed, profile).value;
            };
            out.push_back(band("P_h change, power 20 -> 120 mW at sigma 0.1 mm", change_vs_larger(ph(0.1, 20), ph(0.1, 120)),
                               0.26, 0.46, "about 36%"));
            out.push_back(band("P_h change, sigma 0.1 -> 0.5 mm at 100 mW", change_vs_larger(ph(0.1, 100), ph(0.5, 100)),
                               0.88, 0.98, "about 93%"));
            out.push_back(band("P_h at sigma 0.05 mm, 20 mW", ph(0.05, 20), 0.9, 1.0, "above 90%"));
            break;
        }
        case 8: {
            const double skin_limit = c.mpe.skin * std::numbers::pi * c.skin_spot_radius * c.skin_spot_radius;
            const auto profile = photometry::make_profile(c);
            const auto ns = detail::kpi_samples(p);
            const std::vector<double> deltas =
                p.sweep.axis2 && p.sweep.axis2->path == "skin.delta_mm" ? p.sweep.axis2->values
                                                                        : std::vector<double>{4, 5, 6, 7, 8};
            double worst = 0.0;
            double damage_2w = 1.0;
            for (double d : deltas) {
                LinkConfig k = c;
                config_io::set_parameter(k, "skin.delta_mm", d);
                k.source.power_tx = skin_limit;
                worst = std::max(worst, kpi::p_damage(k, ns, p.sweep.seed, profile).value);
                if (d < 7.0) {
                    k.source.power_tx = 2.0;
                    damage_2w = std::min(damage_2w, kpi::p_damage(k, ns, p.sweep.seed, profile).value);
                }
            }
            out.push_back(band("largest P_d at the skin-MPE power over the delta curves", worst, 0.0, 1e-2,
                               "skin MPE binds before damage"));
            out.push_back(band("smallest P_d at 2 W over delta < 7 mm", damage_2w, 0.9, 1.0,
                               "almost certain (conflicts with the MPE ordering, see calibration.md)"));
            break;
        }
        default: throw DomainError("figure number must lie in 3..8");
    }
    return out;
}

}  // namespace aoci::figures
