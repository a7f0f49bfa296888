// aoci: link-budget evaluation, parameter sweeps, figure presets and the
// validation suite.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "aoci/config_io.hpp"
#include "aoci/csv.hpp"
#include "aoci/errors.hpp"
#include "aoci/figures.hpp"
#include "aoci/kpi.hpp"
#include "aoci/photometry.hpp"
#include "aoci/sweep.hpp"
#include "aoci/validate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace aoci;

enum Exit : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct Flags {
    std::string config;
    std::string method;
    std::optional<std::int64_t> samples;
    std::optional<std::uint64_t> seed;
    std::string out;  // empty: eval writes no file, sweeps write to the working directory
    bool svg = false;
    bool strict = false;
    bool quick = false;
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path.string(), "cannot open for writing");
    f << text;
    if (!f) throw ConfigError(path.string(), "write failed");
}

std::optional<photometry::Method> method_flag(const Flags& f) {
    if (f.method.empty()) return std::nullopt;
    auto m = photometry::parse_method(f.method);
    if (!m) throw ConfigError("--method", "expected series, quadrature or mc");
    return m;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

LinkConfig load_config(const std::string& path) {
    std::vector<std::string> warnings;
    LinkConfig cfg = config_io::load(path, &warnings);
    print_warnings(warnings);
    return cfg;
}

int cmd_eval(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config", "required");
    const LinkConfig cfg = load_config(f.config);
    const auto method = method_flag(f).value_or(photometry::Method::quadrature);
    const std::int64_t samples = f.samples.value_or(100000);
    const std::uint64_t seed = f.seed.value_or(42);
    const std::string hash = config_io::config_hash(cfg);
    const ChannelState st = derive(cfg);

    const auto est = photometry::mean_flux(cfg, method, {samples, seed, stochastics::default_workers()}, f.strict);
    const double budget = photometry::link_budget(est.value, cfg.neural);
    const std::int64_t kpi_n = std::max(samples, kpi::kMinKpiSamples);
    const auto report = kpi::evaluate(cfg, kpi_n, seed);

    std::printf("config_hash %s\nseed %llu\n\n", hash.c_str(), static_cast<unsigned long long>(seed));
    std::printf("channel state\n");
    std::printf("  h_l                 %.9g\n", st.h_l);
    std::printf("  w_delta [m]         %.9g\n", st.beam.w_delta);
    std::printf("  upsilon             %.9g\n", st.beam.upsilon);
    std::printf("  w_eq [m]            %.9g\n", st.beam.w_eq);
    std::printf("  A0                  %.9g\n", st.beam.a0);
    std::printf("  G_c                 %.9g\n", st.g_c);
    std::printf("  k                   %.9g\n", st.k);
    std::printf("  coupling argument   %.9g\n\n", st.coupling_argument);
    std::printf("mean photon flux [photons/s]\n  %.9g +/- %.3g (%s)\n", est.value, est.err_bound,
                std::string(photometry::to_string(est.method)).c_str());
    if (est.n_samples) std::printf("  samples %lld\n", static_cast<long long>(*est.n_samples));
    if (!est.note.empty()) std::printf("  note: %s\n", est.note.c_str());
    std::printf("link budget [photons per window]\n  %.9g\n\n", budget);
    std::printf("KPIs (Monte Carlo, %lld samples, 95%% Wilson intervals)\n", static_cast<long long>(kpi_n));
    std::printf("  P_hearing           %.6f [%.6f, %.6f]\n", report.p_hearing.value, report.p_hearing.ci_low,
                report.p_hearing.ci_high);
    std::printf("  P_damage            %.6f [%.6f, %.6f]\n", report.p_damage.value, report.p_damage.ci_low,
                report.p_damage.ci_high);
    std::printf("  P_false_hearing     %.9g (Pr N >= y_th); Q(y_th+1, B) form %.9g\n",
                report.p_false_hearing.literal, report.p_false_hearing.gamma_q_form);
    const auto& s = report.safety;
    std::printf("safety\n");
    std::printf("  skin irradiance     %.6g W/m^2 (%s)\n", s.skin_irradiance, s.mpe_skin_ok ? "within MPE" : "exceeds MPE");
    std::printf("  neuron irradiance   %.6g W/m^2 (%s)\n", s.neuron_irradiance,
                s.mpe_neuron_ok ? "within MPE" : "exceeds MPE");
    if (s.dynamic_range.empty) {
        std::printf("  dynamic range       empty\n");
    } else {
        std::printf("  dynamic range       [%.6g, %.6g] W\n", s.dynamic_range.min_power, s.dynamic_range.max_power);
    }

    if (!f.out.empty()) {
        csv::Writer w;
        w.row({"config_hash", "seed", "quantity", "value", "err_bound", "ci_low", "ci_high", "method", "note"});
        const std::string sd = std::to_string(seed);
        auto row = [&](const char* q, double v, std::string err, std::string lo, std::string hi, std::string m,
                       std::string note) { w.row({hash, sd, q, csv::number(v), err, lo, hi, m, note}); };
        row("h_l", st.h_l, "", "", "", "", "");
        row("w_delta", st.beam.w_delta, "", "", "", "", "");
        row("upsilon", st.beam.upsilon, "", "", "", "", "");
        row("w_eq", st.beam.w_eq, "", "", "", "", "");
        row("a0", st.beam.a0, "", "", "", "", "");
        row("g_c", st.g_c, "", "", "", "", "");
        row("k", st.k, "", "", "", "", "");
        row("mean_flux", est.value, csv::number(est.err_bound), "", "",
            std::string(photometry::to_string(est.method)), est.note);
        row("link_budget", budget, "", "", "", "", "");
        row("p_hearing", report.p_hearing.value, "", csv::number(report.p_hearing.ci_low),
            csv::number(report.p_hearing.ci_high), "monte_carlo", "");
        row("p_damage", report.p_damage.value, "", csv::number(report.p_damage.ci_low),
            csv::number(report.p_damage.ci_high), "monte_carlo", "");
        row("p_false_hearing", report.p_false_hearing.literal, "", "", "", "closed_form", "");
        row("p_false_hearing_gamma_q_form", report.p_false_hearing.gamma_q_form, "", "", "", "closed_form", "");
        row("skin_irradiance", s.skin_irradiance, "", "", "", "", "");
        row("neuron_irradiance", s.neuron_irradiance, "", "", "", "", "");
        row("dynamic_range_min", s.dynamic_range.min_power, "", "", "", "", "");
        row("dynamic_range_max", s.dynamic_range.max_power, "", "", "", "", "");
        write_file(fs::path(f.out) / "eval.csv", w.str());
    }
    return kOk;
}

sweep::Options sweep_options(const Flags& f) {
    sweep::Options o;
    o.method = method_flag(f);
    o.samples = f.samples;
    o.seed = f.seed;
    o.strict = f.strict;
    return o;
}

int emit(const sweep::Result& res, const LinkConfig& base, const Flags& f, const std::string& stem, bool svg) {
    const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
    const fs::path csv_path = dir / (stem + ".csv");
    write_file(csv_path, sweep::to_csv(res));
    std::printf("wrote %s\n", csv_path.string().c_str());
    if (svg) {
        const fs::path svg_path = dir / (stem + ".svg");
        write_file(svg_path, sweep::to_svg(res, base));
        std::printf("wrote %s\n", svg_path.string().c_str());
    }
    std::size_t failed = 0;
    for (const auto& r : res.rows) failed += r.error.empty() ? 0 : 1;
    if (failed) std::fprintf(stderr, "%zu of %zu rows carry an error\n", failed, res.rows.size());
    if (f.strict && res.any_numerical_failure()) {
        std::fprintf(stderr, "numerical failure in strict mode\n");
        return kNumericalFailure;
    }
    return kOk;
}

int cmd_sweep(const Flags& f, const std::string& sweep_path) {
    if (f.config.empty()) throw ConfigError("--config", "required");
    const LinkConfig base = load_config(f.config);
    const auto spec = sweep::load_spec(sweep_path);
    const auto res = sweep::run(base, spec, sweep_options(f));
    return emit(res, base, f, fs::path(sweep_path).stem().string(), f.svg);
}

int cmd_figure(const Flags& f, int n) {
    auto preset = figures::load_preset(n);
    if (!f.config.empty()) preset.config = load_config(f.config);
    const auto res = sweep::run(preset.config, preset.sweep, sweep_options(f));
    const int code = emit(res, preset.config, f, "fig" + std::to_string(n), true);
    std::printf("trend checks for figure %d\n", n);
    for (const auto& t : figures::trend_checks(n, preset)) {
        std::printf("  [%s] %s: %.4g, accepted [%.4g, %.4g]; reference %s\n", t.ok ? "ok" : "off", t.name.c_str(),
                    t.value, t.lo, t.hi, t.reference.c_str());
    }
    return code;
}

int cmd_validate(const Flags& f) {
    verification::Options o;
    o.quick = f.quick;
    bool ok = true;
    auto report = [&](const verification::CheckResult& r) {
        std::printf("%s\n", verification::report_line(r).c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
    };
    for (const auto& r : verification::check_coupling(o)) report(r);
    report(verification::check_three_way(o));
    report(verification::check_pointing_integral(o));
    report(verification::check_poisson(o));
    report(verification::check_monotonicity(o));
    std::printf("%s\n", ok ? "validation passed" : "validation FAILED");
    return ok ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical cochlear implant link-budget simulator"};
    app.require_subcommand(1);
    Flags f;
    std::string method_help = "series, quadrature or mc";

    auto* eval = app.add_subcommand("eval", "evaluate one configuration");
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    auto* figure = app.add_subcommand("figure", "run a bundled figure preset (3..8)");
    auto* validate_cmd = app.add_subcommand("validate", "run the oracle-equivalence suite");

    std::string sweep_path;
    int figure_number = 0;
    for (auto* sub : {eval, sweep_cmd, figure}) {
        sub->add_option("--config", f.config, "JSON configuration");
        sub->add_option("--method", f.method, method_help);
        sub->add_option("--samples", f.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
        sub->add_option("--seed", f.seed, "Monte Carlo seed");
        sub->add_option("--out", f.out, "output directory");
        sub->add_flag("--strict", f.strict, "treat series non-convergence as an error");
    }
    for (auto* sub : {sweep_cmd, figure}) sub->add_flag("--svg", f.svg, "also write an SVG plot");
    eval->add_flag("--svg", f.svg, "accepted for symmetry; eval writes no plot");
    sweep_cmd->add_option("sweep", sweep_path, "JSON sweep specification")->required();
    figure->add_option("n", figure_number, "figure number")->required()->check(CLI::Range(3, 8));
    validate_cmd->add_flag("--quick", f.quick, "reduced grids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*eval) return cmd_eval(f);
        if (*sweep_cmd) return cmd_sweep(f, sweep_path);
        if (*figure) return cmd_figure(f, figure_number);
        return cmd_validate(f);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalFailure;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
}
