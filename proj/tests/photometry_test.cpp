#include "aoci/photometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "baseline.hpp"
#include "oracles.hpp"

namespace {

using namespace aoci;
using namespace aoci::photometry;
using aoci::testing::baseline_config;
using aoci::testing::with_argument;

double relative_gap(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

TEST(PhotonFlux, OneMilliwattAtTableWavelength) {
    EXPECT_NEAR(photon_flux(1e-3, 594e-9), 2.9903e15, 1e11);
}

TEST(ReceivedFlux, MatchesChainProduct) {
    const auto cfg = baseline_config();
    const auto st = derive(cfg);
    const double r = 0.03e-3;
    const double eta = optics::coupling_eta_closed(cfg.coupling, r, cfg.numerics.series);
    const double expected = st.k * eta * st.g_c * st.h_l * channel::pointing_gain(st.beam, r) *
                            photon_flux(cfg.source.power_tx, cfg.source.lambda);
    EXPECT_NEAR(received_flux_at(r, cfg), expected, 1e-12 * expected);
}

TEST(ReceivedFlux, ZeroPower) {
    auto cfg = baseline_config();
    cfg.source.power_tx = 0.0;
    EXPECT_EQ(received_flux_at(0.0, cfg), 0.0);
    EXPECT_EQ(mean_flux_series(cfg, cfg.numerics.series).value, 0.0);
    EXPECT_EQ(mean_flux_quadrature(cfg, cfg.numerics.quad).value, 0.0);
}

TEST(ReceivedFlux, DecreasingOnMainLobe) {
    const auto cfg = baseline_config();
    double prev = received_flux_at(0.0, cfg);
    for (int i = 1; i <= 30; ++i) {
        const double r = 1.5 * cfg.coupling.omega0 * i / 30.0;
        const double v = received_flux_at(r, cfg);
        EXPECT_LT(v, prev) << "r = " << r;
        prev = v;
    }
}

TEST(ReceivedFlux, RejectsNegativeRadius) {
    EXPECT_THROW((void)received_flux_at(-1e-6, baseline_config()), DomainError);
}

TEST(MeanFlux, SeriesAgreesWithQuadratureAtSmallArgument) {
    const auto cfg = with_argument(baseline_config(), 0.1);
    const double s = mean_flux_series(cfg, cfg.numerics.series).value;
    const double q = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
    EXPECT_LE(relative_gap(s, q), 1e-6);
}

TEST(MeanFlux, SeriesAgreesWithQuadratureAcrossPointingErrors) {
    for (double sigma : {0.005e-3, 0.01e-3, 0.03e-3, 0.1e-3, 0.2e-3, 0.5e-3}) {
        auto cfg = baseline_config();
        cfg.beam.sigma_s = sigma;
        const auto s = mean_flux_series(cfg, cfg.numerics.series);
        const auto q = mean_flux_quadrature(cfg, cfg.numerics.quad);
        EXPECT_LE(relative_gap(s.value, q.value), 1e-6) << "sigma = " << sigma;
        EXPECT_GE(s.err_bound, 0.0);
    }
}

TEST(MeanFlux, DegeneratePointingMatchesOnAxisFlux) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 1e-7;
    const double phi0 = received_flux_at(0.0, cfg);
    EXPECT_LE(relative_gap(mean_flux_series(cfg, cfg.numerics.series).value, phi0), 1e-3);
    EXPECT_LE(relative_gap(mean_flux_quadrature(cfg, cfg.numerics.quad).value, phi0), 1e-3);
}

TEST(MeanFlux, InverseSquareTailInPointingError) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 4e-3;
    const double lo = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
    cfg.beam.sigma_s = 8e-3;
    const double hi = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
    const double slope = std::log(hi / lo) / std::log(2.0);
    EXPECT_NEAR(slope, -2.0, 0.05);
}

TEST(MeanFlux, SeriesFailureAdvertisesQuadrature) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 5e-3;
    specfun::SeriesControl tight;
    tight.max_terms_per_index = 40;
    try {
        (void)mean_flux_series(cfg, tight);
        FAIL() << "expected a series failure";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("mean_flux_quadrature"), std::string::npos);
    }
}

TEST(MeanFlux, DispatcherFallsBackUnlessStrict) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 5e-3;
    cfg.numerics.series.max_terms_per_index = 40;
    const auto est = mean_flux(cfg, Method::series);
    EXPECT_EQ(est.method, Method::quadrature);
    EXPECT_FALSE(est.note.empty());
    EXPECT_THROW((void)mean_flux(cfg, Method::series, {}, true), NumericalError);
}

TEST(MeanFlux, LinearInPowerAndStaticGains) {
    auto cfg = baseline_config();
    const double base = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
    cfg.source.power_tx *= 2.0;
    EXPECT_NEAR(mean_flux_quadrature(cfg, cfg.numerics.quad).value, 2.0 * base, 1e-13 * base);
    const double base_series = mean_flux_series(baseline_config(), cfg.numerics.series).value;
    EXPECT_NEAR(mean_flux_series(cfg, cfg.numerics.series).value, 2.0 * base_series, 1e-13 * base_series);
    auto lossy = baseline_config();
    lossy.fiber.n_fbg = 2;
    const double ratio = mean_flux_quadrature(lossy, lossy.numerics.quad).value / base;
    EXPECT_NEAR(ratio, 0.9, 1e-12);
}

TEST(MeanFlux, DecreasingInDepthAndPointingError) {
    double prev = INFINITY;
    for (double delta : {2e-3, 4e-3, 6e-3, 8e-3, 10e-3}) {
        auto cfg = baseline_config();
        cfg.skin.delta = delta;
        const double v = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
        EXPECT_LT(v, prev) << "delta = " << delta;
        prev = v;
    }
    prev = INFINITY;
    for (double sigma : {0.01e-3, 0.05e-3, 0.1e-3, 0.3e-3, 1e-3, 3e-3}) {
        auto cfg = baseline_config();
        cfg.beam.sigma_s = sigma;
        const double v = mean_flux_quadrature(cfg, cfg.numerics.quad).value;
        EXPECT_LT(v, prev) << "sigma = " << sigma;
        prev = v;
    }
}

TEST(MeanFluxMc, DegeneratePointing) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 1e-9;
    const auto est = mean_flux_mc(cfg, 1000, 7);
    const double phi0 = received_flux_at(0.0, cfg);
    EXPECT_LE(relative_gap(est.value, phi0), 1e-9);
    EXPECT_LE(est.err_bound, 1e-9 * phi0);
    ASSERT_TRUE(est.n_samples.has_value());
    EXPECT_EQ(*est.n_samples, 1000);
    EXPECT_EQ(*est.seed, 7u);
}

TEST(MeanFluxMc, RejectsSmallBudgets) {
    EXPECT_THROW((void)mean_flux_mc(baseline_config(), 999, 1), DomainError);
}

TEST(MeanFluxMc, StandardErrorShrinksWithSamples) {
    const auto cfg = baseline_config();
    const auto profile = make_profile(cfg);
    double ratio_sum = 0.0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s) {
        const double e1 = mean_flux_mc(cfg, 20000, 100 + s, profile).err_bound;
        const double e2 = mean_flux_mc(cfg, 40000, 200 + s, profile).err_bound;
        ratio_sum += e2 / e1;
    }
    EXPECT_NEAR(ratio_sum / seeds, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(MeanFluxMc, IndependentOfWorkerCount) {
    const auto cfg = baseline_config();
    const auto profile = make_profile(cfg);
    const auto one = mean_flux_mc(cfg, 50000, 3, profile, 1);
    const auto four = mean_flux_mc(cfg, 50000, 3, profile, 4);
    EXPECT_EQ(one.value, four.value);
    EXPECT_EQ(one.err_bound, four.err_bound);
}

TEST(MeanFluxMc, AgreesWithQuadratureOnRandomConfigs) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(gen)); };
    int outside = 0;
    for (int i = 0; i < 20; ++i) {
        auto cfg = with_argument(baseline_config(), log_uniform(0.1, 4.0));
        cfg.beam.sigma_s = log_uniform(0.01e-3, 1e-3);
        cfg.skin.delta = 2e-3 + 8e-3 * unit(gen);
        cfg.beam.theta = (10.0 + 30.0 * unit(gen)) * std::numbers::pi / 180.0;
        const auto q = mean_flux_quadrature(cfg, cfg.numerics.quad);
        const auto mc = mean_flux_mc(cfg, 1000000, 11 + i);
        if (std::fabs(mc.value - q.value) > 3.0 * mc.err_bound) ++outside;
    }
    // Each comparison fails with probability 0.0027 by chance alone.
    EXPECT_LE(outside, 1);
}

TEST(CouplingProfile, TracksDirectEvaluation) {
    for (double a : {0.1, aoci::testing::kOptimalArgument, 5.0}) {
        const auto cfg = with_argument(baseline_config(), a);
        const optics::CouplingProfile profile(cfg.coupling, 1e-3, cfg.numerics.series, cfg.numerics.quad);
        const double eta0 = optics::coupling_eta(cfg.coupling, 0.0, cfg.numerics.series, cfg.numerics.quad);
        for (int i = 0; i <= 97; ++i) {
            const double r = 1.1e-3 * i / 97.0;
            const double direct = optics::coupling_eta(cfg.coupling, r, cfg.numerics.series, cfg.numerics.quad);
            EXPECT_NEAR(profile(r), direct, 1e-9 * eta0) << "a = " << a << " r = " << r;
        }
    }
}

TEST(ResponseWindow, Examples) {
    EXPECT_NEAR(response_window_gain(0.15), 0.094818, 1e-6);
    EXPECT_THROW((void)response_window_gain(0.0), DomainError);
    NeuralParams np{10.0, 0.15, 5.0, 100.0};
    EXPECT_NEAR(link_budget(1e15, np), 9.4818e13 + 1.5, 1e8);
    EXPECT_DOUBLE_EQ(link_budget(0.0, np), 1.5);
    const double phi = 3.7e14;
    EXPECT_EQ(link_budget(phi, np), phi * response_window_gain(np.tau) + np.background_mean());
}

TEST(BackgroundPmf, Examples) {
    NeuralParams quiet{0.0, 0.15, 5.0, 100.0};
    EXPECT_EQ(background_pmf(quiet, 0), 1.0);
    EXPECT_EQ(background_pmf(quiet, 3), 0.0);
    NeuralParams np{10.0, 0.15, 5.0, 100.0};
    EXPECT_NEAR(background_pmf(np, 0), 0.22313, 1e-5);
    double total = 0.0;
    for (int n = 0; n <= 50; ++n) total += background_pmf(np, n);
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(background_pmf(np, 5), oracle::poisson_cdf(5, 1.5) - oracle::poisson_cdf(4, 1.5),
                1e-15);
    EXPECT_THROW((void)background_pmf(np, -1), DomainError);
}

TEST(Method, ParsesNames) {
    EXPECT_EQ(parse_method("mc"), Method::monte_carlo);
    EXPECT_EQ(parse_method("series"), Method::series);
    EXPECT_EQ(parse_method("quadrature"), Method::quadrature);
    EXPECT_FALSE(parse_method("simpson").has_value());
    EXPECT_EQ(to_string(Method::monte_carlo), "monte_carlo");
}

}  // namespace
