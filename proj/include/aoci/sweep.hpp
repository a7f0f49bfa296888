#pragma once

// One- and two-axis parameter sweeps over a LinkConfig, with CSV and SVG
// rendering. Grid points are evaluated in grid order; Monte Carlo metrics
// reuse one seed at every point so neighbouring values share random numbers.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "aoci/config_io.hpp"
#include "aoci/csv.hpp"
#include "aoci/errors.hpp"
#include "aoci/kpi.hpp"
#include "aoci/photometry.hpp"
#include "aoci/svg.hpp"

namespace aoci::sweep {

enum class Metric { mean_flux, p_hearing, p_false_hearing, p_damage, link_budget };

[[nodiscard]] inline std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::mean_flux: return "mean_flux";
        case Metric::p_hearing: return "p_hearing";
        case Metric::p_false_hearing: return "p_false_hearing";
        case Metric::p_damage: return "p_damage";
        case Metric::link_budget: return "link_budget";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<Metric> parse_metric(std::string_view s) noexcept {
    for (auto m : {Metric::mean_flux, Metric::p_hearing, Metric::p_false_hearing, Metric::p_damage,
                   Metric::link_budget}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

[[nodiscard]] inline std::string_view unit_label(Metric m) noexcept {
    switch (m) {
        case Metric::mean_flux: return "photons/s";
        case Metric::link_budget: return "photons";
        default: return "probability";
    }
}

struct Axis {
    std::string path;
    std::vector<double> values;
};

struct PlotSpec {
    enum class Kind { lines, heatmap } kind = Kind::lines;
    bool log_x = false;
    bool log_y = false;
    bool mpe_line = false;  // vertical marker at the skin-MPE power (power axes only)
};

struct SweepSpec {
    std::string title;
    std::vector<Metric> metrics;
    photometry::Method method = photometry::Method::quadrature;
    std::int64_t samples = 20000;
    std::uint64_t seed = 42;
    Axis axis1;
    std::optional<Axis> axis2;
    PlotSpec plot;
};

struct Options {
    std::optional<photometry::Method> method;
    std::optional<std::int64_t> samples;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    int workers = stochastics::default_workers();
};

struct Row {
    double v1 = 0.0;
    std::optional<double> v2;
    Metric metric = Metric::mean_flux;
    double value = NAN;
    double err_bound = NAN;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::string method;
    std::string note;
    std::string error;
    bool numerical_failure = false;
};

struct Result {
    SweepSpec spec;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::int64_t samples = 0;
    std::vector<Row> rows;

    [[nodiscard]] bool any_numerical_failure() const {
        for (const auto& r : rows) {
            if (r.numerical_failure) return true;
        }
        return false;
    }
};

namespace detail {

inline Axis parse_axis(const config_io::Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where, "expected an object with path and values");
    Axis a;
    if (!j.contains("path") || !j["path"].is_string()) throw ConfigError(where + ".path", "expected a string");
    a.path = j["path"].get<std::string>();
    if (!config_io::is_parameter(a.path)) {
        throw ConfigError(where + ".path", "'" + a.path + "' is not a numeric configuration parameter");
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "path" && k != "values" && k != "range") throw ConfigError(where + "." + k, "unknown key");
    }
    if (j.contains("values") == j.contains("range")) {
        throw ConfigError(where, "give exactly one of values or range");
    }
    if (j.contains("values")) {
        if (!j["values"].is_array()) throw ConfigError(where + ".values", "expected an array");
        for (const auto& v : j["values"]) {
            if (!v.is_number()) throw ConfigError(where + ".values", "expected numbers");
            a.values.push_back(v.get<double>());
        }
    } else {
        const auto& r = j["range"];
        if (!r.is_object() || !r.contains("from") || !r.contains("to") || !r.contains("count")) {
            throw ConfigError(where + ".range", "expected {from, to, count[, scale]}");
        }
        const double from = r["from"].get<double>();
        const double to = r["to"].get<double>();
        const int count = r["count"].get<int>();
        const std::string scale = r.value("scale", std::string("linear"));
        if (count < 1) throw ConfigError(where + ".range.count", "must be >= 1");
        if (scale != "linear" && scale != "log") throw ConfigError(where + ".range.scale", "linear or log");
        if (scale == "log" && !(from > 0.0 && to > 0.0)) throw ConfigError(where + ".range", "log range needs > 0");
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            a.values.push_back(scale == "log" ? from * std::pow(to / from, t) : from + (to - from) * t);
        }
    }
    if (a.values.empty()) throw ConfigError(where + ".values", "must not be empty");
    for (double v : a.values) {
        if (!std::isfinite(v)) throw ConfigError(where + ".values", "must be finite");
    }
    if (a.values.size() > 1) {
        const bool up = a.values[1] > a.values[0];
        for (std::size_t i = 1; i < a.values.size(); ++i) {
            if (up ? !(a.values[i] > a.values[i - 1]) : !(a.values[i] < a.values[i - 1])) {
                throw ConfigError(where + ".values", "must be strictly monotone");
            }
        }
    }
    return a;
}

}  // namespace detail

[[nodiscard]] inline SweepSpec parse_spec(const config_io::Json& j) {
    if (!j.is_object()) throw ConfigError("<sweep>", "expected a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k != "title" && k != "metric" && k != "method" && k != "mc" && k != "axis1" && k != "axis2" &&
            k != "plot") {
            throw ConfigError(k, "unknown key");
        }
    }
    SweepSpec s;
    s.title = j.value("title", std::string());
    if (!j.contains("metric")) throw ConfigError("metric", "missing");
    auto add_metric = [&](const config_io::Json& m) {
        if (!m.is_string()) throw ConfigError("metric", "expected a metric name");
        auto parsed = parse_metric(m.get<std::string>());
        if (!parsed) throw ConfigError("metric", "unknown metric '" + m.get<std::string>() + "'");
        s.metrics.push_back(*parsed);
    };
    if (j["metric"].is_array()) {
        for (const auto& m : j["metric"]) add_metric(m);
        if (s.metrics.empty()) throw ConfigError("metric", "must not be empty");
    } else {
        add_metric(j["metric"]);
    }
    if (j.contains("method")) {
        auto m = photometry::parse_method(j["method"].get<std::string>());
        if (!m) throw ConfigError("method", "expected series, quadrature or mc");
        s.method = *m;
    }
    if (j.contains("mc")) {
        const auto& mc = j["mc"];
        if (mc.contains("samples")) s.samples = mc["samples"].get<std::int64_t>();
        if (mc.contains("seed")) s.seed = mc["seed"].get<std::uint64_t>();
    }
    if (!j.contains("axis1")) throw ConfigError("axis1", "missing");
    s.axis1 = detail::parse_axis(j["axis1"], "axis1");
    if (j.contains("axis2")) s.axis2 = detail::parse_axis(j["axis2"], "axis2");
    if (j.contains("plot")) {
        const auto& p = j["plot"];
        const std::string kind = p.value("kind", std::string("lines"));
        if (kind == "heatmap") {
            s.plot.kind = PlotSpec::Kind::heatmap;
            if (!s.axis2) throw ConfigError("plot.kind", "a heatmap needs axis2");
        } else if (kind != "lines") {
            throw ConfigError("plot.kind", "expected lines or heatmap");
        }
        s.plot.log_x = p.value("log_x", false);
        s.plot.log_y = p.value("log_y", false);
        s.plot.mpe_line = p.value("mpe_line", false);
    }
    return s;
}

[[nodiscard]] inline SweepSpec load_spec(const std::string& path) {
    const std::string text = config_io::read_file(path);
    try {
        return parse_spec(config_io::Json::parse(text));
    } catch (const config_io::Json::exception& e) {
        throw ConfigError(path, e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.path(), e.message());
    }
}

namespace detail {

inline bool needs_profile(Metric m) { return m == Metric::p_hearing || m == Metric::p_damage; }

using ProfileKey = std::tuple<double, double, double, double>;

inline ProfileKey key_of(const optics::CouplingParams& cp) { return {cp.D, cp.F, cp.omega0, cp.lambda}; }

}  // namespace detail

// Evaluates every grid point and metric. Configuration and numerical errors
// at a point are recorded in its row and the sweep continues.
[[nodiscard]] inline Result run(const LinkConfig& base, const SweepSpec& spec, const Options& opt = {}) {
    Result res;
    res.spec = spec;
    if (opt.method) res.spec.method = *opt.method;
    if (opt.samples) res.spec.samples = *opt.samples;
    if (opt.seed) res.spec.seed = *opt.seed;
    res.config_hash = config_io::config_hash(base);
    res.seed = res.spec.seed;
    res.samples = res.spec.samples;
    const auto& s = res.spec;

    const std::vector<double> second = s.axis2 ? s.axis2->values : std::vector<double>{NAN};

    // Grid configurations, validated once each.
    struct Point {
        LinkConfig cfg;
        std::string error;
    };
    std::vector<Point> points;
    for (double v2 : second) {
        for (double v1 : s.axis1.values) {
            Point p{base, {}};
            try {
                config_io::set_parameter(p.cfg, s.axis1.path, v1);
                if (s.axis2) config_io::set_parameter(p.cfg, s.axis2->path, v2);
                (void)validate(p.cfg);
            } catch (const ConfigError& e) {
                p.error = e.what();
            } catch (const DomainError& e) {
                p.error = e.what();
            }
            points.push_back(std::move(p));
        }
    }

    // One coupling profile per distinct lens/fiber pair, wide enough for the
    // largest pointing error on the grid.
    std::map<detail::ProfileKey, std::pair<double, std::optional<optics::CouplingProfile>>> profiles;
    bool any_mc = s.method == photometry::Method::monte_carlo;
    for (auto m : s.metrics) any_mc = any_mc || detail::needs_profile(m);
    if (any_mc) {
        for (const auto& p : points) {
            if (!p.error.empty()) continue;
            auto& slot = profiles[detail::key_of(p.cfg.coupling)];
            slot.first = std::max(slot.first, photometry::profile_radius(p.cfg.beam.sigma_s));
        }
    }
    auto profile_for = [&](const LinkConfig& c) -> const optics::CouplingProfile& {
        auto& slot = profiles.at(detail::key_of(c.coupling));
        if (!slot.second) {
            slot.second.emplace(c.coupling, slot.first, c.numerics.series, c.numerics.quad);
        }
        return *slot.second;
    };

    std::size_t idx = 0;
    for (double v2 : second) {
        for (double v1 : s.axis1.values) {
            const Point& p = points[idx++];
            for (auto metric : s.metrics) {
                Row row;
                row.v1 = v1;
                if (s.axis2) row.v2 = v2;
                row.metric = metric;
                if (!p.error.empty()) {
                    row.error = p.error;
                    res.rows.push_back(std::move(row));
                    continue;
                }
                try {
                    const LinkConfig& c = p.cfg;
                    switch (metric) {
                        case Metric::mean_flux:
                        case Metric::link_budget: {
                            photometry::FluxEstimate est;
                            if (s.method == photometry::Method::monte_carlo) {
                                est = photometry::mean_flux_mc(c, s.samples, s.seed, profile_for(c), opt.workers);
                            } else {
                                est = photometry::mean_flux(c, s.method, {s.samples, s.seed, opt.workers}, opt.strict);
                            }
                            row.method = std::string(photometry::to_string(est.method));
                            row.note = est.note;
                            if (metric == Metric::mean_flux) {
                                row.value = est.value;
                                row.err_bound = est.err_bound;
                            } else {
                                row.value = photometry::link_budget(est.value, c.neural);
                                row.err_bound = est.err_bound * photometry::response_window_gain(c.neural.tau);
                            }
                            break;
                        }
                        case Metric::p_hearing:
                        case Metric::p_damage: {
                            const auto e = metric == Metric::p_hearing
                                               ? kpi::p_hearing(c, s.samples, s.seed, profile_for(c), opt.workers)
                                               : kpi::p_damage(c, s.samples, s.seed, profile_for(c), opt.workers);
                            row.value = e.value;
                            row.err_bound = 0.5 * (e.ci_high - e.ci_low);
                            row.ci_low = e.ci_low;
                            row.ci_high = e.ci_high;
                            row.method = "monte_carlo";
                            break;
                        }
                        case Metric::p_false_hearing: {
                            const auto fh = kpi::p_false_hearing(c.neural);
                            row.value = fh.literal;
                            row.err_bound = 0.0;
                            row.method = "closed_form";
                            row.note = "gamma_q_form=" + csv::number(fh.gamma_q_form);
                            break;
                        }
                    }
                } catch (const NumericalError& e) {
                    row.error = e.what();
                    row.value = e.best_estimate();
                    row.err_bound = e.achieved_error();
                    row.numerical_failure = true;
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                res.rows.push_back(std::move(row));
            }
        }
    }
    return res;
}

// Columns depend only on the sweep shape: config_hash, seed, samples, the
// axis paths, metric, value, err_bound, ci_low, ci_high, method, note, error.
[[nodiscard]] inline std::string to_csv(const Result& res) {
    csv::Writer w;
    std::vector<std::string> head = {"config_hash", "seed", "samples", res.spec.axis1.path};
    if (res.spec.axis2) head.push_back(res.spec.axis2->path);
    for (const char* c : {"metric", "value", "err_bound", "ci_low", "ci_high", "method", "note", "error"}) {
        head.emplace_back(c);
    }
    w.row(head);
    for (const auto& r : res.rows) {
        std::vector<std::string> cells = {res.config_hash, std::to_string(res.seed), std::to_string(res.samples),
                                          csv::number(r.v1)};
        if (res.spec.axis2) cells.push_back(csv::number(*r.v2));
        cells.emplace_back(to_string(r.metric));
        cells.push_back(csv::number(r.value));
        cells.push_back(csv::number(r.err_bound));
        cells.push_back(r.ci_low ? csv::number(*r.ci_low) : "");
        cells.push_back(r.ci_high ? csv::number(*r.ci_high) : "");
        cells.push_back(r.method);
        cells.push_back(r.note);
        cells.push_back(r.error);
        w.row(cells);
    }
    return w.str();
}

// Transmit power at which the skin irradiance reaches its MPE, in the units
// of a "source.power_<unit>" axis, or nullopt for other axes.
[[nodiscard]] inline std::optional<double> skin_mpe_marker(const LinkConfig& cfg, const std::string& path) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) return std::nullopt;
    const auto r = config_io::resolve(path.substr(0, dot), path.substr(dot + 1));
    if (!r || r->field->section != "source" || r->field->name != "power") return std::nullopt;
    const double watts = cfg.mpe.skin * std::numbers::pi * cfg.skin_spot_radius * cfg.skin_spot_radius;
    return watts / r->unit->scale;
}

namespace detail {

// Provenance comment placed right after the XML declaration.
inline std::string stamp(std::string svg, const Result& res) {
    const auto eol = svg.find('\n');
    svg.insert(eol == std::string::npos ? 0 : eol + 1, "<!-- config_hash=" + res.config_hash +
                                                           " seed=" + std::to_string(res.seed) +
                                                           " samples=" + std::to_string(res.samples) + " -->\n");
    return svg;
}

}  // namespace detail

[[nodiscard]] inline std::string to_svg(const Result& res, const LinkConfig& base) {
    const auto& s = res.spec;
    svg::Axes axes;
    axes.title = s.title.empty() ? std::string(to_string(s.metrics.front())) : s.title;
    axes.x_label = s.axis1.path;
    axes.log_x = s.plot.log_x;
    if (s.plot.kind == PlotSpec::Kind::heatmap && s.axis2) {
        axes.y_label = s.axis2->path;
        axes.log_y = s.plot.log_y;
        const std::size_t nx = s.axis1.values.size();
        std::vector<std::vector<double>> grid(s.axis2->values.size(), std::vector<double>(nx, NAN));
        const Metric m = s.metrics.front();
        std::size_t k = 0;
        for (const auto& r : res.rows) {
            if (r.metric == m) {
                if (r.error.empty()) grid[k / nx][k % nx] = r.value;
                ++k;
            }
        }
        return detail::stamp(svg::heatmap(axes, s.axis1.values, s.axis2->values, grid,
                                          std::string(to_string(m)) + " [" + std::string(unit_label(m)) + "]"),
                             res);
    }
    axes.y_label = std::string(to_string(s.metrics.front())) + " [" + std::string(unit_label(s.metrics.front())) + "]";
    if (s.metrics.size() > 1) axes.y_label = "value";
    axes.log_y = s.plot.log_y;
    std::vector<svg::Series> series;
    const std::vector<double> second = s.axis2 ? s.axis2->values : std::vector<double>{NAN};
    for (std::size_t mi = 0; mi < s.metrics.size(); ++mi) {
        for (double v2 : second) {
            svg::Series line;
            line.dashed = mi > 0;
            line.label = s.metrics.size() > 1 ? std::string(to_string(s.metrics[mi])) : std::string();
            if (s.axis2) {
                if (!line.label.empty()) line.label += ", ";
                const auto dot = s.axis2->path.find('.');
                line.label += s.axis2->path.substr(dot + 1) + "=" + svg::detail::fmt(v2);
            }
            for (const auto& r : res.rows) {
                if (r.metric != s.metrics[mi]) continue;
                if (s.axis2 && *r.v2 != v2) continue;
                line.x.push_back(r.v1);
                line.y.push_back(r.error.empty() ? r.value : NAN);
            }
            series.push_back(std::move(line));
        }
    }
    std::optional<svg::VerticalMarker> marker;
    if (s.plot.mpe_line) {
        if (auto x = skin_mpe_marker(base, s.axis1.path)) marker = svg::VerticalMarker{*x, "skin MPE"};
    }
    return detail::stamp(svg::line_plot(axes, series, marker), res);
}

}  // namespace aoci::sweep
