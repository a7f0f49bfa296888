#pragma once

// Oracle-equivalence and property suite behind `aoci validate`.
//
// Each check compares two independent evaluations (closed form against
// quadrature, series against Monte Carlo, incomplete gamma against explicit
// Poisson sums) or asserts a monotonicity property under common random
// numbers. Quick mode shrinks every grid.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "aoci/channel.hpp"
#include "aoci/config.hpp"
#include "aoci/kpi.hpp"
#include "aoci/optics.hpp"
#include "aoci/photometry.hpp"
#include "aoci/reference.hpp"
#include "aoci/specfun/quadrature.hpp"
#include "aoci/specfun/special.hpp"
#include "aoci/stochastics.hpp"

#ifndef AOCI_VALIDATE_PERTURB
#define AOCI_VALIDATE_PERTURB 0.0
#endif

namespace aoci::verification {

struct CheckResult {
    std::string id;
    std::string name;
    bool passed = false;
    double worst = 0.0;  // worst observed discrepancy, in the units of `limit`
    double limit = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    bool quick = false;
    int workers = stochastics::default_workers();
};

namespace detail {

inline double log_point(double lo, double hi, int i, int n) {
    return n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

inline double lin_point(double lo, double hi, int i, int n) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

template <class F>
CheckResult timed(F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = body();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

}  // namespace detail

// Coupling-efficiency grid: a log-spaced over [0.05, 5], r/omega0 linear over
// [0, 3], and ten mode-field radii, with D = 0.1 mm and lambda = 594 nm.
struct CouplingGridPoint {
    optics::CouplingParams cp;
    double r = 0.0;
};

[[nodiscard]] inline std::vector<CouplingGridPoint> coupling_grid(bool quick) {
    const std::vector<double> omegas = quick ? std::vector<double>{0.05e-3, 0.1e-3, 0.45e-3}
                                             : std::vector<double>{0.05e-3, 0.07e-3, 0.1e-3, 0.15e-3, 0.2e-3,
                                                                   0.3e-3,  0.45e-3, 0.6e-3, 0.8e-3, 1.0e-3};
    const int na = quick ? 5 : 10;
    const int nr = quick ? 5 : 10;
    std::vector<CouplingGridPoint> out;
    for (double w0 : omegas) {
        for (int i = 0; i < na; ++i) {
            const double a = detail::log_point(0.05, 5.0, i, na);
            optics::CouplingParams cp{0.1e-3, optics::focal_length_for_argument(0.1e-3, w0, 594e-9, a), w0, 594e-9};
            for (int j = 0; j < nr; ++j) out.push_back({cp, detail::lin_point(0.0, 3.0, j, nr) * w0});
        }
    }
    return out;
}

// Criterion 1 and the grid half of criterion 2.
[[nodiscard]] inline std::vector<CheckResult> check_coupling(const Options& opt) {
    double grid_max = 0.0;
    CheckResult equivalence = detail::timed([&] {
        CheckResult r;
        r.id = "1";
        r.name = "coupling efficiency: closed form vs integral";
        r.limit = 1e-6;
        const specfun::SeriesControl series;
        const specfun::QuadControl quad;
        int compared = 0;
        int skipped = 0;
        for (const auto& p : coupling_grid(opt.quick)) {
            const double reference = optics::coupling_eta_integral(p.cp, p.r, quad);
            grid_max = std::max(grid_max, reference);
            double closed = 0.0;
            try {
                closed = optics::coupling_eta_closed(p.cp, p.r, series) * (1.0 + AOCI_VALIDATE_PERTURB);
            } catch (const NumericalError&) {
                ++skipped;
                continue;
            }
            grid_max = std::max(grid_max, closed);
            ++compared;
            const double gap = reference == 0.0 ? std::fabs(closed) : std::fabs(closed - reference) / reference;
            r.worst = std::max(r.worst, gap);
        }
        r.passed = compared > 0 && r.worst <= r.limit;
        r.detail = std::to_string(compared) + " points compared, " + std::to_string(skipped) +
                   " outside series convergence";
        return r;
    });
    equivalence.passed = equivalence.passed && equivalence.seconds <= 60.0;

    CheckResult maximum = detail::timed([&] {
        CheckResult r;
        r.id = "2";
        r.name = "coupling efficiency maximum";
        r.limit = 5e-4;
        // Golden-section search of the on-axis efficiency over a.
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = 0.3;
        double hi = 3.0;
        double x1 = hi - g * (hi - lo);
        double x2 = lo + g * (hi - lo);
        double f1 = optics::coupling_eta_on_axis(x1);
        double f2 = optics::coupling_eta_on_axis(x2);
        for (int i = 0; i < 100; ++i) {
            if (f1 > f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = optics::coupling_eta_on_axis(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = optics::coupling_eta_on_axis(x2);
            }
        }
        const double peak = std::max(f1, f2);
        r.worst = std::fabs(peak - optics::kMaxCouplingEfficiency);
        const bool bounded = grid_max <= peak + 1e-12;
        r.passed = r.worst <= r.limit && bounded;
        r.detail = detail::fmt("max eta(0) = %.6f at a = %.5f; grid maximum %.6f", peak, 0.5 * (lo + hi), grid_max) +
                   (bounded ? "" : " exceeds the on-axis peak");
        return r;
    });
    return {equivalence, maximum};
}

// A reproducible random link drawn from the configuration space the suite
// covers. Uses the Philox streams so draws match across platforms.
[[nodiscard]] inline LinkConfig random_config(std::uint64_t index) {
    stochastics::RngStream s(0xC0FFEEull, index);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, s.uniform()); };
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * s.uniform(); };
    LinkConfig c = reference::config();
    c.coupling.omega0 = log_uniform(0.05e-3, 0.3e-3);
    c = reference::with_argument(c, log_uniform(0.1, 4.0));
    c.beam.sigma_s = log_uniform(0.01e-3, 1e-3);
    c.skin.delta = uniform(4e-3, 10e-3);
    c.beam.theta = uniform(5.0, 30.0) * std::numbers::pi / 180.0;
    c.source.power_tx = log_uniform(5e-3, 200e-3);
    return c;
}

// Criterion 3.
[[nodiscard]] inline CheckResult check_three_way(const Options& opt) {
    return detail::timed([&] {
        CheckResult r;
        r.id = "3";
        r.name = "average flux: series vs quadrature vs Monte Carlo";
        r.limit = 1e-6;
        const int configs = opt.quick ? 5 : 20;
        const std::int64_t samples = opt.quick ? 100000 : 1000000;
        int series_compared = 0;
        double worst_z = 0.0;
        bool mc_ok = true;
        for (int i = 0; i < configs; ++i) {
            const LinkConfig c = random_config(static_cast<std::uint64_t>(i));
            const double q = photometry::mean_flux_quadrature(c, c.numerics.quad).value;
            try {
                const double s = photometry::mean_flux_series(c, c.numerics.series).value;
                r.worst = std::max(r.worst, std::fabs(s - q) / q);
                ++series_compared;
            } catch (const NumericalError&) {
            }
            const auto mc = photometry::mean_flux_mc(c, samples, 1000 + i, photometry::make_profile(c), opt.workers);
            const double z = std::fabs(mc.value - q) / mc.err_bound;
            worst_z = std::max(worst_z, z);
            mc_ok = mc_ok && z <= 3.0;
        }
        r.passed = r.worst <= r.limit && mc_ok;
        r.detail = std::to_string(series_compared) + "/" + std::to_string(configs) +
                   " configs within series convergence; worst |MC - quadrature| = " +
                   detail::fmt("%.2f standard errors", worst_z);
        return r;
    });
}

// Criterion 4.
[[nodiscard]] inline CheckResult check_pointing_integral(const Options& opt) {
    return detail::timed([&] {
        CheckResult r;
        r.id = "4";
        r.name = "pointing average: quadrature vs closed form";
        r.limit = 1e-8;
        const std::vector<double> sigmas = opt.quick ? std::vector<double>{0.01e-3, 1e-3}
                                                     : std::vector<double>{0.005e-3, 0.01e-3, 0.1e-3, 1e-3, 5e-3};
        const std::vector<double> deltas = opt.quick ? std::vector<double>{6e-3} : std::vector<double>{4e-3, 7e-3, 10e-3};
        const std::vector<double> thetas = opt.quick ? std::vector<double>{20.0} : std::vector<double>{5.0, 20.0, 30.0};
        specfun::QuadControl qc;
        qc.rel_tol = 1e-11;
        int n = 0;
        for (double sigma : sigmas) {
            for (double delta : deltas) {
                for (double theta : thetas) {
                    const channel::BeamGeometry g{theta * std::numbers::pi / 180.0, 2.2e-3, sigma};
                    const auto st = channel::beam_stats(g, delta);
                    auto f = [&](double x) { return channel::pointing_gain(st, x) * channel::rayleigh_pdf(sigma, x); };
                    const double c = 2.0 / (st.w_eq * st.w_eq) + 1.0 / (2.0 * sigma * sigma);
                    const double q = specfun::integrate_semi_infinite(f, 1.0 / std::sqrt(2.0 * c), qc).value;
                    const double exact = channel::mean_pointing_gain(st, sigma);
                    r.worst = std::max(r.worst, std::fabs(q - exact) / exact);
                    ++n;
                }
            }
        }
        r.passed = r.worst <= r.limit;
        r.detail = std::to_string(n) + " geometries";
        return r;
    });
}

// Criterion 5. Explicit Poisson sums in long double are the oracle.
[[nodiscard]] inline CheckResult check_poisson(const Options& opt) {
    return detail::timed([&] {
        CheckResult r;
        r.id = "5";
        r.name = "Poisson identities: incomplete gamma vs explicit sums";
        r.limit = 1e-12;
        const int y_step = opt.quick ? 10 : 1;
        const int nb = opt.quick ? 7 : 25;
        int n = 0;
        for (int bi = 0; bi < nb; ++bi) {
            const double b = detail::log_point(1e-6, 100.0, bi, nb);
            // pmf(k) in long double via log space, accumulated into the CDF.
            std::vector<long double> cdf(202);
            long double acc = 0.0L;
            for (int k = 0; k <= 201; ++k) {
                acc += std::exp(k * std::log(static_cast<long double>(b)) - static_cast<long double>(b) -
                                std::lgamma(static_cast<long double>(k) + 1.0L));
                cdf[k] = acc;
            }
            for (int y = 0; y <= 200; y += y_step) {
                const NeuralParams np{b / 0.15, 0.15, static_cast<double>(y), 1e30};
                const auto fh = kpi::p_false_hearing(np);
                const double closed_gap = std::fabs(fh.gamma_q_form - static_cast<double>(cdf[y]));
                const double survival = y == 0 ? 1.0 : static_cast<double>(1.0L - cdf[y - 1]);
                const double via_q = y == 0 ? 1.0 : 1.0 - specfun::regularized_gamma_q(y, b);
                const double literal_gap =
                    std::max(std::fabs(fh.literal - survival), std::fabs(fh.literal - via_q));
                r.worst = std::max({r.worst, closed_gap, literal_gap});
                ++n;
            }
        }
        r.passed = r.worst <= r.limit;
        r.detail = std::to_string(n) + " (y_th, B) pairs";
        return r;
    });
}

// Criterion 8, on the reference link.
[[nodiscard]] inline CheckResult check_monotonicity(const Options& opt) {
    return detail::timed([&] {
        CheckResult r;
        r.id = "8";
        r.name = "monotonicity under common random numbers";
        r.limit = 0.0;
        std::vector<std::string> failures;
        const LinkConfig base = reference::config();
        auto flux = [](const LinkConfig& c) { return photometry::mean_flux_quadrature(c, c.numerics.quad).value; };

        double prev = INFINITY;
        for (double d : {4e-3, 5.5e-3, 7e-3, 8.5e-3, 10e-3}) {
            LinkConfig c = base;
            c.skin.delta = d;
            const double v = flux(c);
            if (!(v < prev)) failures.push_back(detail::fmt("flux not decreasing at delta = %g m", d));
            prev = v;
        }
        prev = INFINITY;
        for (double s : {0.01e-3, 0.03e-3, 0.1e-3, 0.3e-3, 1e-3}) {
            LinkConfig c = base;
            c.beam.sigma_s = s;
            const double v = flux(c);
            if (!(v < prev)) failures.push_back(detail::fmt("flux not decreasing at sigma_s = %g m", s));
            prev = v;
        }

        const std::int64_t n = opt.quick ? 10000 : 20000;
        const std::uint64_t seed = 42;
        LinkConfig wide = base;
        wide.beam.sigma_s = 0.5e-3;
        const auto profile = photometry::make_profile(wide);
        prev = -1.0;
        for (double x : {5e-3, 10e-3, 20e-3, 40e-3, 120e-3}) {
            LinkConfig c = base;
            c.source.power_tx = x;
            const double p = kpi::p_hearing(c, n, seed, profile, opt.workers).value;
            if (p < prev) failures.push_back(detail::fmt("P_h decreasing at x = %g W", x));
            prev = p;
        }
        prev = 2.0;
        for (double s : {0.02e-3, 0.05e-3, 0.1e-3, 0.2e-3, 0.5e-3}) {
            LinkConfig c = base;
            c.beam.sigma_s = s;
            const double p = kpi::p_hearing(c, n, seed, profile, opt.workers).value;
            if (p > prev) failures.push_back(detail::fmt("P_h increasing at sigma_s = %g m", s));
            prev = p;
        }
        LinkConfig damage = base;
        damage.beam.sigma_s = 0.05e-3;
        for (double x : {0.02, 0.5, 2.0, 3.0, 5.0}) {
            damage.source.power_tx = x;
            const double ph = kpi::p_hearing(damage, n, seed, profile, opt.workers).value;
            const double pd = kpi::p_damage(damage, n, seed, profile, opt.workers).value;
            if (pd > ph) failures.push_back(detail::fmt("P_d > P_h at x = %g W", x));
        }
        r.worst = static_cast<double>(failures.size());
        r.passed = failures.empty();
        r.detail = failures.empty() ? "5-point grids over delta, sigma_s and x" : failures.front();
        return r;
    });
}

[[nodiscard]] inline std::vector<CheckResult> run_all(const Options& opt) {
    std::vector<CheckResult> out = check_coupling(opt);
    out.push_back(check_three_way(opt));
    out.push_back(check_pointing_integral(opt));
    out.push_back(check_poisson(opt));
    out.push_back(check_monotonicity(opt));
    return out;
}

[[nodiscard]] inline bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

[[nodiscard]] inline std::string report_line(const CheckResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "[%s] criterion %s: %s: worst %.3g (limit %.3g), %.1f s; %s",
                  r.passed ? "PASS" : "FAIL", r.id.c_str(), r.name.c_str(), r.worst, r.limit, r.seconds,
                  r.detail.c_str());
    return buf;
}

}  // namespace aoci::verification
