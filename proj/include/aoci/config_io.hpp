#pragma once

// JSON ingestion and canonical serialization of LinkConfig.
//
// Keys carry an explicit unit suffix (`delta_mm`, `power_mw`, ...); each
// quantity accepts several units and is converted to SI once on ingestion.
// The canonical form writes every quantity in its SI unit, so
// parse(serialize(c)) reproduces c bit for bit.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aoci/config.hpp"
#include "aoci/errors.hpp"
#include "aoci/optics.hpp"
#include "aoci/photometry.hpp"

namespace aoci::config_io {

using Json = nlohmann::ordered_json;

struct Unit {
    std::string_view suffix;  // empty for dimensionless quantities
    double scale;             // SI value = given value * scale
};

enum class Kind { real, integer };

struct Field {
    std::string_view section;
    std::string_view name;
    std::vector<Unit> units;  // the first unit is the canonical SI one
    std::function<double&(LinkConfig&)> real;
    std::function<int&(LinkConfig&)> integer;
    bool required = true;

    [[nodiscard]] Kind kind() const noexcept { return integer ? Kind::integer : Kind::real; }

    [[nodiscard]] std::string key(const Unit& u) const {
        std::string k(name);
        if (!u.suffix.empty()) {
            k += '_';
            k += u.suffix;
        }
        return k;
    }
};

namespace detail {

inline const std::vector<Unit> kLength{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"cm", 1e-2}};
inline const std::vector<Unit> kWavelength{{"m", 1.0}, {"nm", 1e-9}, {"um", 1e-6}};
inline const std::vector<Unit> kPower{{"w", 1.0}, {"mw", 1e-3}, {"uw", 1e-6}};
inline const std::vector<Unit> kAttenuation{{"per_m", 1.0}, {"per_mm", 1e3}, {"per_cm", 1e2}};
inline const std::vector<Unit> kAngle{{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
inline const std::vector<Unit> kTime{{"s", 1.0}, {"ms", 1e-3}};
inline const std::vector<Unit> kRate{{"per_s", 1.0}};
inline const std::vector<Unit> kIrradiance{{"w_per_m2", 1.0}, {"mw_per_mm2", 1e3}, {"mw_per_cm2", 10.0}};
inline const std::vector<Unit> kCount{{"photons", 1.0}};
inline const std::vector<Unit> kBendLoss{{"db_per_90deg", 1.0}};
inline const std::vector<Unit> kPlain{{"", 1.0}};

template <class F>
Field real(std::string_view section, std::string_view name, const std::vector<Unit>& units, F&& ref,
           bool required = true) {
    Field f{section, name, units, std::forward<F>(ref), {}, required};
    return f;
}

template <class F>
Field integer(std::string_view section, std::string_view name, F&& ref, bool required = true) {
    Field f{section, name, kPlain, {}, std::forward<F>(ref), required};
    return f;
}

}  // namespace detail

// Every numeric configuration field with a fixed SI slot in LinkConfig.
[[nodiscard]] inline const std::vector<Field>& fields() {
    using namespace detail;
    static const std::vector<Field> table = {
        real("source", "power", kPower, [](LinkConfig& c) -> double& { return c.source.power_tx; }),
        real("source", "lambda", kWavelength, [](LinkConfig& c) -> double& { return c.source.lambda; }),
        real("skin", "delta", kLength, [](LinkConfig& c) -> double& { return c.skin.delta; }),
        real("skin", "mu_a", kAttenuation, [](LinkConfig& c) -> double& { return c.skin.mu_a; }),
        real("skin", "mu_s", kAttenuation, [](LinkConfig& c) -> double& { return c.skin.mu_s; }),
        real("beam", "theta", kAngle, [](LinkConfig& c) -> double& { return c.beam.theta; }),
        real("beam", "beta", kLength, [](LinkConfig& c) -> double& { return c.beam.beta; }),
        real("beam", "sigma_s", kLength, [](LinkConfig& c) -> double& { return c.beam.sigma_s; }),
        real("mem", "d_in", kLength, [](LinkConfig& c) -> double& { return c.mem.d_in; }),
        real("mem", "f", kLength, [](LinkConfig& c) -> double& { return c.mem.f; }),
        real("mem", "z0", kLength, [](LinkConfig& c) -> double& { return c.mem.z0; }),
        real("coupling", "D", kLength, [](LinkConfig& c) -> double& { return c.coupling.D; }),
        real("coupling", "F", kLength, [](LinkConfig& c) -> double& { return c.coupling.F; }, false),
        real("coupling", "omega0", kLength, [](LinkConfig& c) -> double& { return c.coupling.omega0; }),
        real("fiber", "bend_loss", kBendLoss, [](LinkConfig& c) -> double& { return c.fiber.bend_db_per_90deg; }),
        real("fiber", "n_quarter_turns", kPlain, [](LinkConfig& c) -> double& { return c.fiber.n_quarter_turns; }),
        real("fiber", "fbg_fraction_lost", kPlain,
             [](LinkConfig& c) -> double& { return c.fiber.fbg_fraction_lost; }),
        integer("fiber", "n_fbg", [](LinkConfig& c) -> int& { return c.fiber.n_fbg; }),
        real("neural", "f0", kRate, [](LinkConfig& c) -> double& { return c.neural.f0; }),
        real("neural", "tau", kTime, [](LinkConfig& c) -> double& { return c.neural.tau; }),
        real("neural", "y_th", kCount, [](LinkConfig& c) -> double& { return c.neural.y_th; }, false),
        real("neural", "d_th", kCount, [](LinkConfig& c) -> double& { return c.neural.d_th; }, false),
        real("safety", "skin_spot_radius", kLength, [](LinkConfig& c) -> double& { return c.skin_spot_radius; }),
        real("safety", "neuron_spot_radius", kLength,
             [](LinkConfig& c) -> double& { return c.neuron_spot_radius; }, false),
        real("safety", "hearing_target", kPlain, [](LinkConfig& c) -> double& { return c.hearing_target; }, false),
        real("safety", "mpe_skin", kIrradiance, [](LinkConfig& c) -> double& { return c.mpe.skin; }, false),
        real("safety", "mpe_neuron", kIrradiance, [](LinkConfig& c) -> double& { return c.mpe.neuron; }, false),
        real("numerics", "series_rel_tol", kPlain,
             [](LinkConfig& c) -> double& { return c.numerics.series.rel_tol; }, false),
        real("numerics", "series_abs_tol", kPlain,
             [](LinkConfig& c) -> double& { return c.numerics.series.abs_tol; }, false),
        integer("numerics", "series_max_terms",
                [](LinkConfig& c) -> int& { return c.numerics.series.max_terms_per_index; }, false),
        real("numerics", "series_cancellation_limit", kPlain,
             [](LinkConfig& c) -> double& { return c.numerics.series.cancellation_limit; }, false),
        real("numerics", "quad_rel_tol", kPlain, [](LinkConfig& c) -> double& { return c.numerics.quad.rel_tol; },
             false),
        real("numerics", "quad_abs_tol", kPlain, [](LinkConfig& c) -> double& { return c.numerics.quad.abs_tol; },
             false),
        integer("numerics", "quad_max_subdivisions",
                [](LinkConfig& c) -> int& { return c.numerics.quad.max_subdivisions; }, false),
        real("numerics", "quad_tail_cutoff_sigmas", kPlain,
             [](LinkConfig& c) -> double& { return c.numerics.quad.tail_cutoff_sigmas; }, false),
    };
    return table;
}

inline constexpr std::string_view kSections[] = {"source", "skin",   "beam",   "mem",     "coupling",
                                                 "fiber",  "neural", "safety", "numerics"};

// Keys outside the registry that are resolved after the SI fields:
//   coupling.coupling_argument   alternative to F (dimensionless a)
//   coupling.lambda_<unit>       optional, must equal source.lambda
//   neural.y_th_power_<unit>     alternative to y_th: power at the fiber output
//   neural.d_th_power_<unit>     alternative to d_th, likewise
//   neural.d_th_photons = "inf"  disables the damage threshold
//   signal_shot_noise            top-level boolean (extension)

struct ResolvedKey {
    const Field* field = nullptr;
    const Unit* unit = nullptr;
};

[[nodiscard]] inline std::optional<ResolvedKey> resolve(std::string_view section, std::string_view key) {
    for (const auto& f : fields()) {
        if (f.section != section) continue;
        for (const auto& u : f.units) {
            if (f.key(u) == key) return ResolvedKey{&f, &u};
        }
    }
    return std::nullopt;
}

namespace detail {

inline std::optional<double> power_unit(std::string_view key, std::string_view stem) {
    if (key.substr(0, stem.size()) != stem || key.size() <= stem.size() + 1 || key[stem.size()] != '_') {
        return std::nullopt;
    }
    const auto suffix = key.substr(stem.size() + 1);
    for (const auto& u : kPower) {
        if (u.suffix == suffix) return u.scale;
    }
    return std::nullopt;
}

inline double number_at(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
}

// Count over one response window delivered by a constant fiber-output power.
inline double power_to_count(double watts, const LinkConfig& c) {
    return photometry::photon_flux(watts, c.source.lambda) * photometry::response_window_gain(c.neural.tau);
}

}  // namespace detail

// Builds a LinkConfig from parsed JSON. Throws ConfigError naming the field
// path on unknown keys, duplicate units, missing fields, or invariant
// violations. Soft warnings are appended to `warnings` when given.
[[nodiscard]] inline LinkConfig from_json(const Json& doc, std::vector<std::string>* warnings = nullptr) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    LinkConfig cfg;
    std::vector<const Field*> seen;
    std::optional<double> coupling_argument;
    std::optional<double> coupling_lambda;
    std::optional<double> y_th_power;
    std::optional<double> d_th_power;
    bool d_th_infinite = false;

    auto mark = [&](const Field* f, const std::string& path) {
        for (const Field* s : seen) {
            if (s == f) throw ConfigError(path, "quantity given more than once (in different units?)");
        }
        seen.push_back(f);
    };

    for (const auto& [section, body] : doc.items()) {
        if (section == "signal_shot_noise") {
            if (!body.is_boolean()) throw ConfigError(section, "expected true or false");
            cfg.signal_shot_noise = body.get<bool>();
            continue;
        }
        bool known = false;
        for (auto s : kSections) known = known || s == section;
        if (!known) throw ConfigError(section, "unknown section");
        if (!body.is_object()) throw ConfigError(section, "expected an object");

        for (const auto& [key, value] : body.items()) {
            const std::string path = section + "." + key;
            if (section == "neural" && key == "d_th_photons" && value.is_string()) {
                if (value.get<std::string>() != "inf") throw ConfigError(path, "expected a number or \"inf\"");
                mark(resolve("neural", "d_th_photons")->field, path);
                d_th_infinite = true;
                continue;
            }
            if (auto r = resolve(section, key)) {
                mark(r->field, path);
                if (r->field->kind() == Kind::integer) {
                    if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
                    r->field->integer(cfg) = value.get<int>();
                } else {
                    r->field->real(cfg) = detail::number_at(value, path) * r->unit->scale;
                }
                continue;
            }
            if (section == "coupling" && key == "coupling_argument") {
                coupling_argument = detail::number_at(value, path);
                continue;
            }
            if (section == "coupling") {
                if (key.rfind("lambda_", 0) == 0) {
                    const auto suffix = std::string_view(key).substr(7);
                    bool matched = false;
                    for (const auto& u : detail::kWavelength) {
                        if (u.suffix == suffix) {
                            coupling_lambda = detail::number_at(value, path) * u.scale;
                            matched = true;
                        }
                    }
                    if (matched) continue;
                }
            }
            if (section == "neural") {
                if (auto s = detail::power_unit(key, "y_th_power")) {
                    if (y_th_power) throw ConfigError(path, "quantity given more than once");
                    y_th_power = detail::number_at(value, path) * *s;
                    continue;
                }
                if (auto s = detail::power_unit(key, "d_th_power")) {
                    if (d_th_power) throw ConfigError(path, "quantity given more than once");
                    d_th_power = detail::number_at(value, path) * *s;
                    continue;
                }
            }
            throw ConfigError(path, "unknown key");
        }
    }

    auto was_seen = [&](std::string_view section, std::string_view name) {
        for (const Field* s : seen) {
            if (s->section == section && s->name == name) return true;
        }
        return false;
    };
    for (const auto& f : fields()) {
        if (f.required && !was_seen(f.section, f.name)) {
            throw ConfigError(std::string(f.section) + "." + std::string(f.name),
                              "missing (expected e.g. " + f.key(f.units.size() > 1 ? f.units[1] : f.units[0]) + ")");
        }
    }

    cfg.coupling.lambda = cfg.source.lambda;
    if (coupling_lambda && *coupling_lambda != cfg.source.lambda) {
        throw ConfigError("coupling.lambda", "must equal source.lambda");
    }
    const bool has_f = was_seen("coupling", "F");
    if (has_f == coupling_argument.has_value()) {
        throw ConfigError("coupling.F", "give exactly one of F_<unit> or coupling_argument");
    }
    if (coupling_argument) {
        if (!(*coupling_argument > 0.0)) throw ConfigError("coupling.coupling_argument", "must be > 0");
        if (!(cfg.coupling.D > 0.0) || !(cfg.coupling.omega0 > 0.0) || !(cfg.source.lambda > 0.0)) {
            throw ConfigError("coupling.coupling_argument", "needs positive D, omega0 and lambda");
        }
        cfg.coupling.F = optics::focal_length_for_argument(cfg.coupling.D, cfg.coupling.omega0, cfg.source.lambda,
                                                           *coupling_argument);
    }

    const bool has_y = was_seen("neural", "y_th");
    if (has_y == y_th_power.has_value()) {
        throw ConfigError("neural.y_th", "give exactly one of y_th_photons or y_th_power_<unit>");
    }
    const bool has_d = was_seen("neural", "d_th");
    if (has_d == d_th_power.has_value()) {
        throw ConfigError("neural.d_th", "give exactly one of d_th_photons or d_th_power_<unit>");
    }
    if (y_th_power || d_th_power) {
        if (!(cfg.neural.tau > 0.0) || !(cfg.source.lambda > 0.0)) {
            throw ConfigError("neural.tau", "must be > 0 to convert threshold powers");
        }
    }
    if (y_th_power) cfg.neural.y_th = detail::power_to_count(*y_th_power, cfg);
    if (d_th_power) cfg.neural.d_th = detail::power_to_count(*d_th_power, cfg);
    if (d_th_infinite) cfg.neural.d_th = std::numeric_limits<double>::infinity();

    auto w = validate(cfg);
    if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
    return cfg;
}

[[nodiscard]] inline LinkConfig parse(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ConfigError("<json>", e.what());
    }
    return from_json(doc, warnings);
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[nodiscard]] inline LinkConfig load(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    const std::string text = read_file(path);
    try {
        return parse(text, warnings);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.path(), e.message());
    }
}

// Canonical SI form. Every real field is emitted, including defaults.
[[nodiscard]] inline Json to_json(const LinkConfig& c) {
    Json doc = Json::object();
    LinkConfig copy = c;
    for (auto section : kSections) doc[std::string(section)] = Json::object();
    for (const auto& f : fields()) {
        Json& sec = doc[std::string(f.section)];
        const std::string key = f.key(f.units.front());
        if (f.kind() == Kind::integer) {
            sec[key] = f.integer(copy);
        } else if (f.section == "neural" && f.name == "d_th" && std::isinf(c.neural.d_th)) {
            sec[key] = "inf";
        } else {
            sec[key] = f.real(copy);
        }
    }
    doc["signal_shot_noise"] = c.signal_shot_noise;
    return doc;
}

[[nodiscard]] inline std::string serialize(const LinkConfig& c) { return to_json(c).dump(2) + "\n"; }

// FNV-1a over the compact canonical form, as 16 hex digits.
[[nodiscard]] inline std::string config_hash(const LinkConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Sets one parameter addressed as "section.key_unit" (the same keys the
// config file accepts, plus coupling.coupling_argument). Used by sweeps.
inline void set_parameter(LinkConfig& c, std::string_view path, double value) {
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) throw ConfigError(std::string(path), "expected section.key");
    const auto section = path.substr(0, dot);
    const auto key = path.substr(dot + 1);
    if (auto r = resolve(section, key)) {
        if (r->field->kind() == Kind::integer) {
            if (value != std::floor(value)) throw ConfigError(std::string(path), "expected an integer value");
            r->field->integer(c) = static_cast<int>(value);
        } else {
            r->field->real(c) = value * r->unit->scale;
        }
        if (section == "source" && r->field->name == "lambda") c.coupling.lambda = c.source.lambda;
        return;
    }
    if (section == "coupling" && key == "coupling_argument") {
        if (!(value > 0.0)) throw ConfigError(std::string(path), "must be > 0");
        c.coupling.F = optics::focal_length_for_argument(c.coupling.D, c.coupling.omega0, c.coupling.lambda, value);
        return;
    }
    throw ConfigError(std::string(path), "not a numeric configuration parameter");
}

// Checks a sweep path without needing a config instance.
[[nodiscard]] inline bool is_parameter(std::string_view path) {
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) return false;
    return resolve(path.substr(0, dot), path.substr(dot + 1)).has_value() ||
           path == "coupling.coupling_argument";
}

}  // namespace aoci::config_io
