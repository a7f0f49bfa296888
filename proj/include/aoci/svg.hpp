#pragma once

// Minimal SVG 1.1 plots: line charts with legend and heatmaps with a colour
// bar, both with optional log axes. Output is byte-deterministic.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace aoci::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

struct VerticalMarker {
    double x = 0.0;
    std::string label;
};

namespace detail {

constexpr double kWidth = 760.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 200.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* colour(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % 10];
}

// Linear or logarithmic map from data to a pixel interval.
struct Scale {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;
    double p0 = 0.0;
    double p1 = 1.0;

    [[nodiscard]] double t(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double u = log ? std::log10(v) : v;
        return b == a ? 0.5 : (u - a) / (b - a);
    }
    [[nodiscard]] double operator()(double v) const { return p0 + (p1 - p0) * t(v); }

    [[nodiscard]] std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
                const double v = std::pow(10.0, e);
                if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
            }
            if (out.size() < 2) out = {lo, hi};
            return out;
        }
        const double span = hi - lo;
        if (!(span > 0.0)) return {lo};
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
            out.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
        }
        return out;
    }
};

inline Scale fit(const std::vector<double>& values, bool log, double p0, double p1) {
    Scale s;
    s.log = log;
    s.p0 = p0;
    s.p1 = p1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v) || (log && v <= 0.0)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) {
        lo = log ? 1.0 : 0.0;
        hi = log ? 10.0 : 1.0;
    }
    if (lo == hi) {
        if (log) {
            lo /= 2.0;
            hi *= 2.0;
        } else {
            const double pad = lo == 0.0 ? 1.0 : 0.1 * std::fabs(lo);
            lo -= pad;
            hi += pad;
        }
    }
    s.lo = lo;
    s.hi = hi;
    return s;
}

inline void header(std::string& out, const Axes& axes) {
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kWidth) + "\" height=\"" +
           fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + px(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(axes.title) + "</text>\n";
}

inline void frame(std::string& out, const Axes& axes, const Scale& xs, const Scale& ys) {
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    out += "<rect x=\"" + px(x0) + "\" y=\"" + px(y1) + "\" width=\"" + px(x1 - x0) + "\" height=\"" + px(y0 - y1) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : xs.ticks()) {
        const double p = xs(t);
        out += "<line x1=\"" + px(p) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(p) + "\" y2=\"" + px(y0 + 5) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + px(p) + "\" y=\"" + px(y0 + 18) + "\" text-anchor=\"middle\">" + fmt(t) + "</text>\n";
    }
    for (double t : ys.ticks()) {
        const double p = ys(t);
        out += "<line x1=\"" + px(x0 - 5) + "\" y1=\"" + px(p) + "\" x2=\"" + px(x0) + "\" y2=\"" + px(p) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + px(x0 - 8) + "\" y=\"" + px(p + 4) + "\" text-anchor=\"end\">" + fmt(t) + "</text>\n";
    }
    out += "<text x=\"" + px((x0 + x1) / 2) + "\" y=\"" + px(kHeight - 25) + "\" text-anchor=\"middle\">" +
           escape(axes.x_label) + (axes.log_x ? " (log)" : "") + "</text>\n";
    out += "<text x=\"20\" y=\"" + px((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           px((y0 + y1) / 2) + ")\">" + escape(axes.y_label) + (axes.log_y ? " (log)" : "") + "</text>\n";
}

// Viridis-like ramp from dark blue through green to yellow.
inline std::string ramp(double t) {
    static const double stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

}  // namespace detail

[[nodiscard]] inline std::string line_plot(const Axes& axes, const std::vector<Series>& series,
                                           const std::optional<VerticalMarker>& marker = std::nullopt) {
    using namespace detail;
    std::vector<double> xs_all;
    std::vector<double> ys_all;
    for (const auto& s : series) {
        xs_all.insert(xs_all.end(), s.x.begin(), s.x.end());
        ys_all.insert(ys_all.end(), s.y.begin(), s.y.end());
    }
    if (marker) xs_all.push_back(marker->x);
    const Scale xs = fit(xs_all, axes.log_x, kLeft, kWidth - kRight);
    const Scale ys = fit(ys_all, axes.log_y, kHeight - kBottom, kTop);

    std::string out;
    header(out, axes);
    frame(out, axes, xs, ys);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        std::string path;
        bool pen_down = false;
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            const bool ok = std::isfinite(s.x[k]) && std::isfinite(s.y[k]) && (!axes.log_x || s.x[k] > 0.0) &&
                            (!axes.log_y || s.y[k] > 0.0);
            if (!ok) {
                pen_down = false;
                continue;
            }
            path += (pen_down ? " L " : (path.empty() ? "M " : " M ")) + px(xs(s.x[k])) + " " + px(ys(s.y[k]));
            pen_down = true;
        }
        if (path.empty()) continue;
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + colour(i) + "\" stroke-width=\"2\"" +
               (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    }
    if (marker) {
        const double p = xs(marker->x);
        out += "<line x1=\"" + px(p) + "\" y1=\"" + px(kTop) + "\" x2=\"" + px(p) + "\" y2=\"" +
               px(kHeight - kBottom) + "\" stroke=\"black\" stroke-dasharray=\"4 4\"/>\n";
        out += "<text x=\"" + px(p + 4) + "\" y=\"" + px(kTop + 14) + "\">" + escape(marker->label) + "</text>\n";
    }
    const double lx = kWidth - kRight + 15;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
        out += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(lx + 25) + "\" y2=\"" + px(ly) +
               "\" stroke=\"" + colour(i) + "\" stroke-width=\"2\"" +
               (series[i].dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        out += "<text x=\"" + px(lx + 32) + "\" y=\"" + px(ly + 4) + "\">" + escape(series[i].label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

// values[j][i] belongs to (x[i], y[j]). Non-finite cells are drawn grey.
[[nodiscard]] inline std::string heatmap(const Axes& axes, const std::vector<double>& x, const std::vector<double>& y,
                                         const std::vector<std::vector<double>>& values,
                                         const std::string& value_label) {
    using namespace detail;
    // Cell edges at midpoints between grid values (geometric on log axes).
    auto edges = [](const std::vector<double>& v, bool log) {
        std::vector<double> e(v.size() + 1);
        auto mid = [log](double a, double b) { return log ? std::sqrt(a * b) : 0.5 * (a + b); };
        for (std::size_t i = 1; i < v.size(); ++i) e[i] = mid(v[i - 1], v[i]);
        if (v.size() == 1) {
            e[0] = log ? v[0] / 2 : v[0] - 0.5;
            e[1] = log ? v[0] * 2 : v[0] + 0.5;
        } else {
            e[0] = log ? v[0] * v[0] / e[1] : 2 * v[0] - e[1];
            e[v.size()] = log ? v.back() * v.back() / e[v.size() - 1] : 2 * v.back() - e[v.size() - 1];
        }
        return e;
    };
    const auto ex = edges(x, axes.log_x);
    const auto ey = edges(y, axes.log_y);
    const Scale xs = fit(ex, axes.log_x, kLeft, kWidth - kRight);
    const Scale ys = fit(ey, axes.log_y, kHeight - kBottom, kTop);
    std::vector<double> all;
    for (const auto& row : values) all.insert(all.end(), row.begin(), row.end());
    const Scale cs = fit(all, false, 0.0, 1.0);

    std::string out;
    header(out, axes);
    for (std::size_t j = 0; j < y.size(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = j < values.size() && i < values[j].size() ? values[j][i] : NAN;
            const double xa = xs(ex[i]);
            const double xb = xs(ex[i + 1]);
            const double ya = ys(ey[j + 1]);
            const double yb = ys(ey[j]);
            out += "<rect x=\"" + px(std::min(xa, xb)) + "\" y=\"" + px(std::min(ya, yb)) + "\" width=\"" +
                   px(std::fabs(xb - xa)) + "\" height=\"" + px(std::fabs(yb - ya)) + "\" fill=\"" +
                   (std::isfinite(v) ? ramp(cs.t(v)) : std::string("#cccccc")) + "\"/>\n";
        }
    }
    frame(out, axes, xs, ys);
    const double bx = kWidth - kRight + 30;
    const double top = kTop;
    const double bottom = kHeight - kBottom;
    const int steps = 50;
    for (int k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) / steps;
        const double y0 = bottom - (bottom - top) * (t0 + 1.0 / steps);
        out += "<rect x=\"" + px(bx) + "\" y=\"" + px(y0) + "\" width=\"20\" height=\"" +
               px((bottom - top) / steps + 0.5) + "\" fill=\"" + ramp(t0 + 0.5 / steps) + "\"/>\n";
    }
    out += "<rect x=\"" + px(bx) + "\" y=\"" + px(top) + "\" width=\"20\" height=\"" + px(bottom - top) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(bx + 26) + "\" y=\"" + px(top + 4) + "\">" + fmt(cs.hi) + "</text>\n";
    out += "<text x=\"" + px(bx + 26) + "\" y=\"" + px(bottom + 4) + "\">" + fmt(cs.lo) + "</text>\n";
    out += "<text x=\"" + px(bx) + "\" y=\"" + px(bottom + 40) + "\">" + escape(value_label) + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace aoci::svg
