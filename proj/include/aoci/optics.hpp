#pragma once

// Implant optics: MEM collimation gain, lens-to-fiber coupling efficiency
// (closed series form and overlap-integral form), and fiber propagation
// efficiency.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aoci/errors.hpp"
#include "aoci/specfun/quadrature.hpp"
#include "aoci/specfun/series.hpp"
#include "aoci/specfun/special.hpp"

namespace aoci::optics {

struct MemParams {
    double d_in = 0.0;  // beam waist to MEM distance [m]
    double f = 0.0;     // MEM focal length [m]
    double z0 = 0.0;    // Rayleigh range of the incident beam [m]
};

struct CouplingParams {
    double D = 0.0;       // coupling-lens diameter [m]
    double F = 0.0;       // coupling-lens focal length [m]
    double omega0 = 0.0;  // fiber mode-field radius [m]
    double lambda = 0.0;  // wavelength [m]
};

struct FiberLoss {
    double bend_db_per_90deg = 0.0;
    double n_quarter_turns = 0.0;
    double fbg_fraction_lost = 0.0;
    int n_fbg = 0;
};

// Literal constants of the Airy-pattern approximation: first J1 zero and
// the Airy-disc factor, kept at the printed precision.
inline constexpr double kAiryZero = 3.83;
inline constexpr double kAiryFactor = 1.22;

// Largest value of 2 (1 - e^{-a})^2 / a, the on-axis coupling efficiency.
inline constexpr double kMaxCouplingEfficiency = 0.8145;

[[nodiscard]] inline double collimation_gain(const MemParams& mem) {
    if (!(mem.f > 0.0) || !(mem.z0 > 0.0) || !(mem.d_in >= 0.0)) {
        throw DomainError("collimation_gain: requires f > 0, z0 > 0, d_in >= 0");
    }
    const double detune = 1.0 - mem.d_in / mem.f;
    const double range = mem.z0 / mem.f;
    return 1.0 / std::hypot(detune, range);
}

inline void validate(const CouplingParams& cp) {
    if (!(cp.D > 0.0) || !(cp.F > 0.0) || !(cp.omega0 > 0.0) || !(cp.lambda > 0.0)) {
        throw DomainError("CouplingParams: D, F, omega0, lambda must all be > 0");
    }
}

// kappa = 3.83 D / (1.22 lambda F); the J1 argument is 2 kappa rho.
[[nodiscard]] inline double airy_wavenumber(const CouplingParams& cp) {
    return kAiryZero * cp.D / (kAiryFactor * cp.lambda * cp.F);
}

// a = 3.83^2 D^2 omega0^2 / (1.22^2 lambda^2 F^2)
[[nodiscard]] inline double coupling_argument(const CouplingParams& cp) {
    const double k = airy_wavenumber(cp) * cp.omega0;
    return k * k;
}

// Focal length that places the coupling argument at `a`.
[[nodiscard]] inline double focal_length_for_argument(double D, double omega0, double lambda, double a) {
    return kAiryZero * D * omega0 / (kAiryFactor * lambda * std::sqrt(a));
}

// eta(r) = 2 a exp(-2 r^2 / omega0^2) Psi_2(1; 2, 1; -a, r^2 / omega0^2)^2
[[nodiscard]] inline double coupling_eta_closed(const CouplingParams& cp, double r,
                                                const specfun::SeriesControl& ctl = {}) {
    validate(cp);
    if (!(r >= 0.0)) throw DomainError("coupling_eta_closed: r must be >= 0");
    const double a = coupling_argument(cp);
    const double y = (r / cp.omega0) * (r / cp.omega0);
    const double psi = specfun::humbert_psi2(2.0, 1.0, -a, y, ctl).value;
    return 2.0 * a * std::exp(-2.0 * y) * psi * psi;
}

// On-axis reduction of the closed form.
[[nodiscard]] inline double coupling_eta_on_axis(double a) {
    const double g = -std::expm1(-a);
    return 2.0 * g * g / a;
}

// Overlap-integral form:
//   eta = (8 / omega0^2) | int_0^inf J1(2 kappa rho) e^{-(rho^2 + r^2)/omega0^2} I0(2 rho r / omega0^2) drho |^2
// with the I0 factor carried as e^{-x} I0(x) and the exponent regrouped as
// -(rho - r)^2 / omega0^2.
[[nodiscard]] inline double coupling_eta_integral(const CouplingParams& cp, double r,
                                                  const specfun::QuadControl& ctl = {}) {
    validate(cp);
    if (!(r >= 0.0)) throw DomainError("coupling_eta_integral: r must be >= 0");
    const double kappa2 = 2.0 * airy_wavenumber(cp);
    const double w = cp.omega0;
    auto integrand = [&](double rho) {
        const double shift = (rho - r) / w;
        const double gauss = std::exp(-shift * shift);
        if (gauss == 0.0) return 0.0;
        return specfun::bessel_j1(kappa2 * rho) * gauss * specfun::bessel_i0_scaled(2.0 * rho * r / (w * w));
    };
    // The Gaussian window sits at rho = r with width omega0. Seed panels a few
    // Airy lobes wide across the window; beyond it the integrand is negligible
    // and is left to the mapped tail.
    const double window = ctl.tail_cutoff_sigmas * w;
    const double lo = std::max(0.0, r - window);
    const double hi = r + window;
    const double lobe = std::numbers::pi / kappa2;
    const int pieces = std::clamp(static_cast<int>((hi - lo) / (4.0 * lobe)), 1, 256);
    std::vector<double> breaks;
    for (int i = 0; i <= pieces; ++i) breaks.push_back(lo + (hi - lo) * i / pieces);
    const double integral =
        specfun::integrate_semi_infinite(integrand, hi / ctl.tail_cutoff_sigmas, ctl, breaks).value;
    return 8.0 / (w * w) * integral * integral;
}

// Closed form where the Psi_2 series can converge, overlap integral otherwise
// (large r / omega0, or a series that reports non-convergence or cancellation).
[[nodiscard]] inline double coupling_eta(const CouplingParams& cp, double r, const specfun::SeriesControl& series,
                                         const specfun::QuadControl& quad) {
    const double y = (r / cp.omega0) * (r / cp.omega0);
    if (y < 0.6 * series.max_terms_per_index) {
        try {
            return coupling_eta_closed(cp, r, series);
        } catch (const NumericalError&) {
        }
    }
    return coupling_eta_integral(cp, r, quad);
}

// Piecewise Chebyshev table of eta(r) on [0, r_max] for the Monte Carlo
// estimators, which evaluate eta at millions of displacements. Panels are
// halved until every panel reproduces direct evaluations at off-node probes
// to `tolerance` relative to eta(0); beyond r_max eta is evaluated directly.
class CouplingProfile {
public:
    static constexpr int kNodes = 16;

    CouplingProfile(const CouplingParams& cp, double r_max, const specfun::SeriesControl& series,
                    const specfun::QuadControl& quad, double tolerance = 1e-10)
        : cp_(cp), series_(series), quad_(quad), r_max_(r_max) {
        validate(cp);
        if (!(r_max > 0.0)) throw DomainError("CouplingProfile: r_max must be > 0");
        const double a = coupling_argument(cp);
        double width = 0.5 * cp.omega0 / std::max(1.0, std::sqrt(a));
        for (int attempt = 0; attempt < 6; ++attempt, width *= 0.5) {
            if (build(width, tolerance)) return;
        }
        throw NumericalError("CouplingProfile: interpolation did not reach tolerance", 0.0, tolerance);
    }

    [[nodiscard]] double operator()(double r) const {
        if (!(r >= 0.0)) throw DomainError("CouplingProfile: r must be >= 0");
        if (r >= r_max_) return coupling_eta(cp_, r, series_, quad_);
        const std::size_t panel = std::min(panels_ - 1, static_cast<std::size_t>(r / width_));
        return evaluate(panel, r);
    }

    [[nodiscard]] double r_max() const noexcept { return r_max_; }
    [[nodiscard]] std::size_t panels() const noexcept { return panels_; }

private:
    // Chebyshev points of the second kind mapped to the panel.
    static double node(int j) noexcept { return std::cos(std::numbers::pi * j / (kNodes - 1)); }

    double evaluate(std::size_t panel, double r) const {
        const double a = static_cast<double>(panel) * width_;
        const double t = 2.0 * (r - a) / width_ - 1.0;
        const double* v = &values_[panel * kNodes];
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < kNodes; ++j) {
            const double diff = t - node(j);
            if (diff == 0.0) return v[j];
            double w = (j % 2 == 0) ? 1.0 : -1.0;
            if (j == 0 || j == kNodes - 1) w *= 0.5;
            w /= diff;
            num += w * v[j];
            den += w;
        }
        return num / den;
    }

    bool build(double width, double tolerance) {
        panels_ = static_cast<std::size_t>(std::ceil(r_max_ / width));
        width_ = r_max_ / static_cast<double>(panels_);
        values_.assign(panels_ * kNodes, 0.0);
        for (std::size_t p = 0; p < panels_; ++p) {
            const double a = static_cast<double>(p) * width_;
            for (int j = 0; j < kNodes; ++j) {
                const double r = a + 0.5 * width_ * (node(j) + 1.0);
                values_[p * kNodes + j] = coupling_eta(cp_, std::max(0.0, r), series_, quad_);
            }
        }
        const double scale = values_[kNodes - 1];  // node(kNodes-1) = -1 maps to r = 0
        for (std::size_t p = 0; p < panels_; ++p) {
            for (double frac : {0.13, 0.52, 0.87}) {
                const double r = (static_cast<double>(p) + frac) * width_;
                const double exact = coupling_eta(cp_, r, series_, quad_);
                if (std::fabs(evaluate(p, r) - exact) > tolerance * scale) return false;
            }
        }
        return true;
    }

    CouplingParams cp_;
    specfun::SeriesControl series_;
    specfun::QuadControl quad_;
    double r_max_;
    double width_ = 0.0;
    std::size_t panels_ = 0;
    std::vector<double> values_;
};

// k = 10^{-bend_dB * quarter_turns / 10} (1 - fbg_loss)^{n_fbg}
[[nodiscard]] inline double fiber_efficiency(const FiberLoss& fl) {
    if (!(fl.bend_db_per_90deg >= 0.0) || !(fl.n_quarter_turns >= 0.0)) {
        throw DomainError("fiber_efficiency: bend loss and turn count must be >= 0");
    }
    if (!(fl.fbg_fraction_lost >= 0.0 && fl.fbg_fraction_lost < 1.0)) {
        throw DomainError("fiber_efficiency: fbg_fraction_lost must lie in [0, 1)");
    }
    if (fl.n_fbg < 0) throw DomainError("fiber_efficiency: n_fbg must be >= 0");
    return std::pow(10.0, -fl.bend_db_per_90deg * fl.n_quarter_turns / 10.0) *
           std::pow(1.0 - fl.fbg_fraction_lost, fl.n_fbg);
}

}  // namespace aoci::optics
