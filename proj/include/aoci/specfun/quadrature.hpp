#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature with a bounded
// subdivision budget, plus a semi-infinite driver that splits at a
// caller-supplied decay scale and maps the tail onto [0, 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "aoci/errors.hpp"

namespace aoci::specfun {

struct QuadControl {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_subdivisions = 2000;
    double tail_cutoff_sigmas = 10.0;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("QuadControl.rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw DomainError("QuadControl.abs_tol must be >= 0");
        if (max_subdivisions < 4) throw DomainError("QuadControl.max_subdivisions must be >= 4");
        if (!(tail_cutoff_sigmas >= 6.0)) throw DomainError("QuadControl.tail_cutoff_sigmas must be >= 6");
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;  // integral of |f|, used for the rounding floor
    int subdivisions = 0;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double gauss = fc * kWg[3];
    double kronrod = fc * kWgk[7];
    double l1 = std::fabs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        l1 += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = kronrod * half;
    double error = std::fabs((kronrod - gauss) * half);
    l1 *= std::fabs(half);
    // Rounding floor: differences below this are noise, not truncation.
    error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * l1);
    return Panel{a, b, value, error, l1};
}

}  // namespace detail

// Integral of f over [breaks.front(), breaks.back()], starting from one panel
// per consecutive pair of breakpoints. Refinement is global: the panel with
// the largest error estimate is bisected until the total error meets the
// tolerance or the subdivision budget runs out.
template <class F>
QuadResult integrate_panels(F&& f, std::span<const double> breaks, const QuadControl& ctl = {}) {
    ctl.validate();
    if (breaks.size() < 2) throw DomainError("integrate_panels: need at least two breakpoints");
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (!std::isfinite(breaks[i])) throw DomainError("integrate_panels: breakpoints must be finite");
        if (i > 0 && !(breaks[i] >= breaks[i - 1])) throw DomainError("integrate_panels: breakpoints must ascend");
    }
    std::priority_queue<detail::Panel> panels;
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    int subdivisions = 0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        if (breaks[i] == breaks[i - 1]) continue;
        const detail::Panel p = detail::kronrod15(f, breaks[i - 1], breaks[i]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        panels.push(p);
        ++subdivisions;
    }
    if (panels.empty()) return {};
    const int budget = std::max(ctl.max_subdivisions, subdivisions);
    const double floor_tol = 100.0 * std::numeric_limits<double>::epsilon();
    auto target = [&] { return std::max({ctl.rel_tol * std::fabs(value), ctl.abs_tol, floor_tol * l1}); };
    while (error > target()) {
        if (subdivisions >= budget) {
            std::ostringstream os;
            os << "integrate: subdivision budget " << ctl.max_subdivisions << " exhausted; estimate " << value
               << ", achieved error " << error;
            throw QuadratureError(os.str(), value, error);
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left = detail::kronrod15(f, worst.a, mid);
        const detail::Panel right = detail::kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }
    // Re-sum from the panels to shed drift from the running updates.
    value = 0.0;
    error = 0.0;
    l1 = 0.0;
    std::vector<detail::Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) { return p.a < q.a; });
    for (const auto& p : all) {
        value += p.value;
        error += p.error;
        l1 += p.l1;
    }
    return QuadResult{value, error, l1, subdivisions};
}

// Integral of f over [a, b].
template <class F>
QuadResult integrate_interval(F&& f, double a, double b, const QuadControl& ctl = {}) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_interval: limits must be finite");
    if (a == b) return {};
    if (b < a) {
        QuadResult r = integrate_interval(f, b, a, ctl);
        r.value = -r.value;
        return r;
    }
    const double ends[2] = {a, b};
    return integrate_panels(f, std::span<const double>(ends), ctl);
}

// Integral of f over (0, inf). `decay_scale` is the length over which f
// falls off; [0, tail_cutoff_sigmas * decay_scale] is integrated directly and
// the remainder through r = c + s t / (1 - t). Interior breakpoints below the
// cutoff seed the adaptive panels where f has structure.
template <class F>
QuadResult integrate_semi_infinite(F&& f, double decay_scale, const QuadControl& ctl = {},
                                   std::span<const double> interior_breaks = {}) {
    ctl.validate();
    if (!(decay_scale > 0.0) || !std::isfinite(decay_scale)) {
        throw DomainError("integrate_semi_infinite: decay scale must be positive and finite");
    }
    const double cutoff = ctl.tail_cutoff_sigmas * decay_scale;
    std::vector<double> breaks{0.0};
    for (const double b : interior_breaks) {
        if (b > breaks.back() && b < cutoff) breaks.push_back(b);
    }
    breaks.push_back(cutoff);
    const QuadResult body = integrate_panels(f, std::span<const double>(breaks), ctl);
    auto mapped = [&](double t) {
        const double s = 1.0 - t;
        if (s <= 0.0) return 0.0;
        const double r = cutoff + decay_scale * t / s;
        if (!std::isfinite(r)) return 0.0;
        const double v = f(r);
        return v == 0.0 ? 0.0 : v * decay_scale / (s * s);
    };
    QuadControl tail_ctl = ctl;
    // The tail only has to be accurate relative to the body.
    tail_ctl.abs_tol = std::max(ctl.abs_tol, 0.1 * ctl.rel_tol * std::fabs(body.value));
    const QuadResult tail = integrate_interval(mapped, 0.0, 1.0, tail_ctl);
    return QuadResult{body.value + tail.value, body.error + tail.error, body.l1 + tail.l1,
                      body.subdivisions + tail.subdivisions};
}

}  // namespace aoci::specfun
