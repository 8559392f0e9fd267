#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlslab/catalog.hpp"
#include "nlslab/integrator.hpp"
#include "nlslab/random_fields.hpp"

using namespace nlslab;

namespace {

constexpr double pi = std::numbers::pi;

Field1D gaussian(const Grid1D& g, double amp, double width = 1.0) {
    return sample_field(g, BackgroundKind::Zero, 0.0,
                        [&](double x) { return cplx(amp * std::exp(-x * x / (width * width))); });
}

double l2_rel_error(const Field1D& a, const Field1D& b) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - b[j]);
        den += std::norm(b[j]);
    }
    return std::sqrt(num / den);
}

EvolveConfig config(const ModelSpec& m, double dt, double t_end, int stride = 1) {
    EvolveConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.sample_stride = stride;
    c.scheme = EvolveConfig::default_scheme(m);
    return c;
}

Field1D evolve_to(const Field1D& f0, const ModelSpec& m, double dt, double t_end) {
    auto traj = evolve(f0, m, config(m, dt, t_end, 1 << 30));
    EXPECT_FALSE(traj.blowup_time.has_value());
    return *traj.final_field;
}

} // namespace

TEST(Step, ConstantStokesBackgroundIsExact) {
    Grid1D g(20.0, 256);
    const auto model = ModelSpec::gross_pitaevskii(-1, 2.0);
    Field1D v(g, CplxVec(g.points(), cplx(1.0)), BackgroundKind::Stokes, 0.0);
    const auto cfg = config(model, 1e-2, 1.0);
    for (int s = 0; s < 50; ++s) v = step(v, model, 1e-2, cfg);
    for (int j = 0; j < g.points(); ++j) EXPECT_EQ(v[j], cplx(1.0));
}

TEST(Step, FreePropagatorAtSmallAmplitude) {
    Grid1D g(20.0, 1024);
    const auto model = ModelSpec::power(-1, 2.0);
    const double amp = 1e-6, dt = 1e-2;
    const auto u0 = gaussian(g, amp);
    const auto u1 = step(u0, model, dt, config(model, dt, dt));
    auto hat = fft::forward(u0.values());
    const auto k = g.wavenumbers();
    for (int j = 0; j < g.points(); ++j) hat[j] *= std::polar(1.0, -k[j] * k[j] * dt);
    const auto exact = fft::inverse(hat);
    double err = 0.0;
    for (int j = 0; j < g.points(); ++j) err = std::max(err, std::abs(u1[j] - exact[j]));
    EXPECT_LT(err / amp, 1e-10);
}

TEST(Step, TimeReversal) {
    Grid1D g(20.0, 1024);
    const auto model = ModelSpec::power(-1, 2.0);
    const auto cfg = config(model, 1e-3, 1.0);
    const auto u0 = random_field(g, {7, 6, 1.5, 25.0});
    auto u = u0;
    for (int s = 0; s < 200; ++s) u = step(u, model, 1e-3, cfg);
    for (int s = 0; s < 200; ++s) u = step(u, model, -1e-3, cfg);
    double err = 0.0;
    for (int j = 0; j < g.points(); ++j) err = std::max(err, std::abs(u[j] - u0[j]));
    EXPECT_LT(err, 1e-8);
}

TEST(Step, RejectsZeroStepAndWrongBackground) {
    Grid1D g(20.0, 128);
    const auto model = ModelSpec::power(-1, 2.0);
    const auto u = gaussian(g, 1.0);
    EXPECT_THROW(step(u, model, 0.0, config(model, 1e-3, 1.0)), ParameterError);
    EXPECT_THROW(step(u, ModelSpec::gross_pitaevskii(-1, 2.0), 1e-3, config(model, 1e-3, 1.0)), ParameterError);
}

TEST(Evolve, StandingWaveReturnsAfterTwoPi) {
    Grid1D g(20.0, 1024);
    const auto sw = ExactSolution::standing_wave(1.0, 2.0);
    const auto u0 = eval_exact(sw, 0.0, g);
    const auto u1 = evolve_to(u0, sw.model(), 1e-4, 2.0 * pi);
    EXPECT_LT(l2_rel_error(u1, u0), 1e-6);
}

TEST(Evolve, SatsumaYajimaOnePeriod) {
    Grid1D g(20.0, 2048);
    const auto sy = ExactSolution::satsuma_yajima();
    const double T = *exact_period(sy);
    EXPECT_NEAR(T, pi / 4.0, 1e-15);
    const auto u0 = eval_exact(sy, 0.0, g);
    auto traj = evolve(u0, sy.model(), config(sy.model(), 1e-4, T, 100));
    ASSERT_FALSE(traj.blowup_time);
    // one period of the breather is e^{iT} times the initial profile
    EXPECT_LT(l2_rel_error(*traj.final_field, eval_exact(sy, T, g)), 1e-4);
    EXPECT_LT(conservation_drift(traj, "m"), 1e-8);
}

TEST(Evolve, StrangIsSecondOrder) {
    Grid1D g(20.0, 2048);
    const auto sy = ExactSolution::satsuma_yajima();
    const double T = pi / 4.0;
    const auto u0 = eval_exact(sy, 0.0, g);
    const auto exact = eval_exact(sy, T, g);
    const double e1 = l2_rel_error(evolve_to(u0, sy.model(), 2e-3, T), exact);
    const double e2 = l2_rel_error(evolve_to(u0, sy.model(), 1e-3, T), exact);
    EXPECT_GE(e1 / e2, 3.2);
    EXPECT_LE(e1 / e2, 4.8);
}

TEST(Evolve, RejectsUnstableStep) {
    Grid1D g(20.0, 128);
    const auto model = ModelSpec::power(-1, 2.0);
    auto cfg = config(model, 0.1, 1.0);
    EXPECT_THROW(evolve(gaussian(g, 1.0), model, cfg), ParameterError);
    cfg = config(model, 1e-3, 1.0);
    cfg.scheme = Scheme::RK4Pseudospectral;
    EXPECT_NO_THROW(evolve(gaussian(g, 1.0), model, cfg));
    EXPECT_THROW(evolve(gaussian(g, 0.5), ModelSpec::dnls(-1), cfg = config(model, 1e-3, 1.0)), ParameterError);
}

TEST(Evolve, DefocusingVirialIsMonotone) {
    Grid1D g(30.0, 1024);
    const auto model = ModelSpec::power(1, 2.0);
    auto traj = evolve(gaussian(g, 1.0), model, config(model, 1e-3, 1.0, 10));
    EXPECT_EQ(traj.virial_name, "p_tilde");
    EXPECT_EQ(traj.monotone_fraction, 1.0);
    EXPECT_EQ(traj.times.size(), traj.virial.size());
    for (std::size_t i = 1; i < traj.times.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
}

TEST(Evolve, MassCriticalGroundStateHasConstantVariance) {
    Grid1D g(20.0, 1024);
    const auto sw = ExactSolution::standing_wave(1.0, 4.0);
    auto traj = evolve(eval_exact(sw, 0.0, g), sw.model(), config(sw.model(), 2.5e-5, 1.0, 400));
    const double v0 = *traj.reports.front().variance;
    for (const auto& r : traj.reports) {
        EXPECT_NEAR(*r.variance, v0, 1e-6);
        EXPECT_NEAR(*r.p_tilde, 0.0, 1e-8);
    }
}

TEST(Evolve, MassCriticalZeroEnergyVarianceIsLinear) {
    Grid1D g(30.0, 1024);
    const auto model = ModelSpec::power(-1, 4.0);
    const double b = 0.05;
    auto f = sample_field(g, BackgroundKind::Zero, 0.0, [&](double x) {
        return std::polar(std::pow(3.0, 0.25) / std::sqrt(std::cosh(2.0 * x)), b * x * x);
    });
    // rescale so E = 0: λ⁴ = 3‖∇f‖² / ‖f‖⁶₆
    const double lambda = std::pow(3.0 * gradient_sq(f) / lp_power(f, 6.0), 0.25);
    f = f.with_values([&] {
        CplxVec v(f.values().begin(), f.values().end());
        for (auto& z : v) z *= lambda;
        return v;
    }());
    ASSERT_NEAR(energy(f, model), 0.0, 1e-10);
    auto traj = evolve(f, model, config(model, 1e-4, 1.0, 100));
    ASSERT_FALSE(traj.blowup_time);
    // least-squares slope of V(t)
    double st = 0, sv = 0, stt = 0, stv = 0;
    const double n = static_cast<double>(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i], v = *traj.reports[i].variance;
        st += t;
        sv += v;
        stt += t * t;
        stv += t * v;
    }
    const double slope = (n * stv - st * sv) / (n * stt - st * st);
    const double expected = 4.0 * *traj.reports.front().p_tilde;
    EXPECT_LT(std::abs(slope - expected) / std::abs(expected), 1e-4) << slope << " vs " << expected;
}

struct ConservationCase {
    const char* name;
    ModelSpec model;
    double amp;
    double width = 1.0;
};

class Conservation : public ::testing::TestWithParam<ConservationCase> {};

TEST_P(Conservation, MassAndEnergyDrift) {
    const auto& c = GetParam();
    Grid1D g(20.0, 1024);
    auto traj = evolve(gaussian(g, c.amp, c.width), c.model, config(c.model, 1e-4, 1.0, 100));
    ASSERT_FALSE(traj.blowup_time);
    EXPECT_LT(conservation_drift(traj, "m"), 1e-8);
    if (c.model.family == Family::DerivativeNLS)
        EXPECT_LT(conservation_drift(traj, "dnls_h"), 1e-6);
    else
        EXPECT_LT(conservation_drift(traj, "e"), 1e-7);
}

INSTANTIATE_TEST_SUITE_P(
    Families, Conservation,
    ::testing::Values(ConservationCase{"power_focusing_cubic", ModelSpec::power(-1, 2.0), 1.0},
                      ConservationCase{"power_defocusing_cubic", ModelSpec::power(1, 2.0), 1.0},
                      ConservationCase{"power_quintic", ModelSpec::power(-1, 4.0), 0.8},
                      ConservationCase{"cubic_quintic", ModelSpec::cubic_quintic(1.0, 0.5), 1.0},
                      ConservationCase{"biharmonic", ModelSpec::biharmonic(-1, 2.0, -1.0), 1.0, 2.0},
                      ConservationCase{"dnls", ModelSpec::dnls(-1), 0.5},
                      ConservationCase{"log", ModelSpec::log_nls(-1), 1.0}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(Conservation, GrossPitaevskiiRandomStokesData) {
    Grid1D g(30.0, 1024);
    const auto model = ModelSpec::gross_pitaevskii(-1, 2.0);
    auto traj = evolve(random_stokes_field(g, {3, 6, 0.3, 25.0}), model, config(model, 1e-4, 1.0, 100));
    ASSERT_FALSE(traj.blowup_time);
    EXPECT_EQ(traj.virial_name, "gp_virial");
    EXPECT_LT(conservation_drift(traj, "m_nz"), 1e-8);
    EXPECT_LT(conservation_drift(traj, "e_gp"), 1e-7);
}

TEST(BlowUp, SupercriticalNegativeEnergyIsRecorded) {
    Grid1D g(20.0, 1024);
    const auto model = ModelSpec::power(-1, 6.0);
    const auto u0 = gaussian(g, 2.0);
    ASSERT_LT(energy(u0, model), 0.0);
    auto traj = evolve(u0, model, config(model, 1e-4, 1.0, 10));
    ASSERT_TRUE(traj.blowup_time.has_value());
    EXPECT_LT(*traj.blowup_time, 1.0);
    EXPECT_LT(traj.times.back(), *traj.blowup_time + 1e-12);
}

TEST(BlowUp, StepThrowsWithLastFiniteField) {
    Grid1D g(20.0, 1024);
    const auto model = ModelSpec::power(-1, 6.0);
    auto u = gaussian(g, 2.0);
    const auto cfg = config(model, 1e-4, 1.0);
    bool thrown = false;
    try {
        for (int s = 0; s < 20000; ++s) u = step(u, model, 1e-4, cfg);
    } catch (const BlowUpError& e) {
        thrown = true;
        EXPECT_TRUE(e.last_field().has_value());
        EXPECT_NE(std::string(e.what()).find("blow-up detected at t"), std::string::npos);
    }
    EXPECT_TRUE(thrown);
}

TEST(LogNls, ClampActivationsAreCounted) {
    const auto model = ModelSpec::log_nls(-1);
    Grid1D g(10.0, 256);
    // zero sample at x = 0
    const auto zero = sample_field(g, BackgroundKind::Zero, 0.0, [](double x) { return cplx(x * std::exp(-x * x / 2)); });
    EXPECT_GT(evolve(zero, model, config(model, 1e-3, 0.01)).log_clamp_count, 0u);
    Grid1D small(5.0, 256);
    EXPECT_EQ(evolve(gaussian(small, 1.0, std::sqrt(2.0)), model, config(model, 1e-3, 0.01)).log_clamp_count, 0u);
}

TEST(Evolve, StepIsAdjustedToLandOnTEnd) {
    Grid1D g(20.0, 256);
    const auto model = ModelSpec::power(-1, 2.0);
    auto traj = evolve(gaussian(g, 1.0), model, config(model, 0.03, 0.1, 1));
    EXPECT_DOUBLE_EQ(traj.times.back(), 0.1);
    EXPECT_EQ(traj.times.size(), 4u);
}

TEST(DetectPeriod, RecoversSinusoidPeriod) {
    std::vector<double> t, y;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(i * 0.01);
        y.push_back(std::sin(2.0 * pi * t.back() / 1.7));
    }
    const auto T = detect_period(t, y);
    ASSERT_TRUE(T);
    EXPECT_NEAR(*T, 1.7, 1e-4);
    EXPECT_FALSE(detect_period({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}));
}
