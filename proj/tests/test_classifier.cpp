#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "nlslab/catalog.hpp"
#include "nlslab/classifier.hpp"

using namespace nlslab;

namespace {

InvariantFacts power_facts(int eps, double p, int n = 1) {
    InvariantFacts f;
    f.model = ModelSpec::power(eps, p, n);
    return f;
}

std::shared_ptr<const ThresholdCache> thresholds() {
    static const auto cache = [] {
        auto c = std::make_shared<ThresholdCache>();
        const Grid1D g1(40.0, 2048);
        c->insert(thresholds_of(ground_state_star(6.0, 1, g1), g1));
        const Grid1D g2(20.0, 1024);
        c->insert(thresholds_of(ground_state_imag_time(2.0, 2, 1.0, g2), g2));
        c->insert(thresholds_of(ground_state_star(3.0, 2, g2), g2));
        return c;
    }();
    return cache;
}

ClassifierConfig full_config() {
    ClassifierConfig c;
    c.thresholds = thresholds();
    c.eps_small = 0.5;
    return c;
}

void expect_precluded(const RegimeVerdict& v, const std::string& rule) {
    EXPECT_EQ(v.status, VerdictStatus::Precluded) << v.rule << ": " << v.inequality << " / " << v.regime;
    EXPECT_EQ(v.rule, rule);
    EXPECT_FALSE(v.inequality.empty());
}

/// A fact set for each table row, built to satisfy exactly that row.
InvariantFacts facts_for_row(const std::string& row) {
    const int table = row[1] - '0';
    const int line = row[3] - '0';
    const double p = table == 1 ? 2.0 : table == 2 ? 4.0 : 6.0;
    auto f = power_facts(line == 1 ? 1 : -1, p);
    f.M = 2.0;
    f.P = 0.0;
    f.E = table == 1 ? -1.0 : table == 2 ? 0.0 : 1.0;
    f.P_tilde0 = 0.0;
    f.l2_norm = 3.0;
    f.grad_l2_at_0 = 1.0;
    if (line == 2) f.P = 0.3;
    if (line == 3) f.E = table == 1 ? 0.5 : table == 2 ? -0.5 : 0.0;
    if (table == 1 && line == 4) {
        f.l2_norm = 0.1;
        f.M = 0.01;
        f.decay_certificate = true;
    }
    if (table == 2 && line == 4) f.l2_norm = 1.0;
    if (table == 2 && line == 5) f.P_tilde0 = 0.5;
    if (table == 3 && line == 4) {
        f.E = 0.05;
        f.M = 0.5;
        f.grad_l2_at_0 = 0.4;
    }
    return f;
}

} // namespace

// --- power NLS ---------------------------------------------------------------------

TEST(PowerRules, DefocusingIsPrecludedInEveryRegime) {
    for (double p : {2.0, 4.0, 6.0}) {
        const auto v = classify(power_facts(1, p));
        expect_precluded(v, "R1");
    }
}

TEST(PowerRules, SatsumaYajimaFactsSurvive) {
    auto f = power_facts(-1, 2.0);
    f.P = 0.0;
    f.E = -112.0 / 3.0;
    f.M = 16.0;
    const auto v = classify(f);
    EXPECT_EQ(v.status, VerdictStatus::NotPrecluded);
    EXPECT_EQ(v.regime, "P = 0, E < 0 and p < 4/n (surviving regime 1)");
}

TEST(PowerRules, NonzeroMomentum) {
    auto f = power_facts(-1, 2.0);
    f.P = 0.25;
    f.E = -1.0;
    expect_precluded(classify(f), "R2");
}

TEST(PowerRules, MissingMomentumIsInconclusive) {
    auto f = power_facts(-1, 2.0);
    f.E = -1.0;
    const auto v = classify(f);
    EXPECT_EQ(v.status, VerdictStatus::Inconclusive);
    EXPECT_NE(v.inequality.find("P"), std::string::npos);
}

TEST(PowerRules, SubcriticalPositiveEnergy) {
    auto f = power_facts(-1, 2.0);
    f.P = 0.0;
    f.E = 0.7;
    const auto v = classify(f);
    expect_precluded(v, "R3.1");
    EXPECT_EQ(v.table_row, "T1.3");
}

TEST(PowerRules, ZeroEnergyOffCritical) {
    auto f = power_facts(-1, 6.0);
    f.P = 0.0;
    f.E = 0.0;
    const auto v = classify(f);
    expect_precluded(v, "R3.2");
    EXPECT_EQ(v.table_row, "T3.3");
}

TEST(PowerRules, NegativeEnergyAtOrAboveCritical) {
    auto f = power_facts(-1, 4.0);
    f.P = 0.0;
    f.E = -0.2;
    expect_precluded(classify(f), "R3.3");
}

TEST(PowerRules, MassCriticalNonzeroVirial) {
    auto f = power_facts(-1, 4.0);
    f.P = 0.0;
    f.E = 0.0;
    f.P_tilde0 = 0.5;
    const auto v = classify(f);
    expect_precluded(v, "R4.i");
    EXPECT_EQ(v.table_row, "T2.5");
}

TEST(PowerRules, MassCriticalBelowGroundStateMass) {
    auto f = power_facts(-1, 4.0);
    f.P = 0.0;
    f.E = 0.0;
    f.P_tilde0 = 0.0;
    f.l2_norm = 1.5; // ||Q||² = √3π/2, ||Q|| ≈ 1.6495
    const auto v = classify(f);
    expect_precluded(v, "R4.ii");
    EXPECT_NE(v.inequality.find("unsquared"), std::string::npos);
    f.l2_norm = 1.7;
    const auto above = classify(f);
    EXPECT_EQ(above.status, VerdictStatus::NotPrecluded);
    EXPECT_EQ(above.regime, "P = 0, E = 0 and p = 4/n (surviving regime 2)");
}

TEST(PowerRules, TwoDimensionalCriticalNeedsTownesThreshold) {
    auto f = power_facts(-1, 2.0, 2);
    f.P = 0.0;
    f.E = 0.0;
    f.P_tilde0 = 0.0;
    f.l2_norm = 3.0;
    EXPECT_EQ(classify(f).status, VerdictStatus::Inconclusive);
    expect_precluded(classify(f, full_config()), "R4.ii"); // ||Q|| ≈ 3.4206
}

TEST(PowerRules, SupercriticalMassEnergyBalance) {
    auto f = power_facts(-1, 6.0);
    f.P = 0.0;
    f.E = 0.05;
    f.M = 0.5;
    f.grad_l2_at_0 = 0.4;
    const auto none = classify(f);
    EXPECT_EQ(none.status, VerdictStatus::Inconclusive);
    EXPECT_EQ(none.rule, "R5");
    const auto v = classify(f, full_config());
    expect_precluded(v, "R5");
    EXPECT_EQ(v.table_row, "T3.4");
    f.E = 1e4;
    EXPECT_EQ(classify(f, full_config()).status, VerdictStatus::NotPrecluded);
}

TEST(PowerRules, SmallDataWithDecayCertificate) {
    auto f = power_facts(-1, 3.0);
    f.P = 0.0;
    f.E = -0.01;
    f.l2_norm = 0.1;
    EXPECT_EQ(classify(f, full_config()).status, VerdictStatus::NotPrecluded);
    f.decay_certificate = true;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
    const auto v = classify(f, full_config());
    expect_precluded(v, "R6");
    EXPECT_EQ(v.table_row, "T1.4");
}

// --- other families ---------------------------------------------------------------------

TEST(GrossPitaevskiiRules, CubicOneDimensional) {
    InvariantFacts f;
    f.model = ModelSpec::gross_pitaevskii(-1, 2.0);
    f.E = 1.0;
    f.M = 1.0;
    expect_precluded(classify(f), "R7.cubic1"); // -(1 + 1/2) < 0
    f.E = -3.0;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(GrossPitaevskiiRules, CubicTwoDimensional) {
    InvariantFacts f;
    f.model = ModelSpec::gross_pitaevskii(-1, 2.0, 2);
    f.E = 0.2;
    f.M = 1.0;
    expect_precluded(classify(f), "R7.cubic2");
    f.E = 0.0;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(GrossPitaevskiiRules, QuinticOneDimensionalIsStrict) {
    InvariantFacts f;
    f.model = ModelSpec::gross_pitaevskii(1, 4.0);
    f.E = 0.3;
    f.M = 1.0;
    expect_precluded(classify(f), "R7.quintic1");
    f.E = 0.0;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(GrossPitaevskiiRules, QuinticTwoDimensional) {
    InvariantFacts f;
    f.model = ModelSpec::gross_pitaevskii(-1, 4.0, 2);
    f.E = -2.0;
    f.M = 1.0;
    expect_precluded(classify(f), "R7.quintic2"); // -(-2 - 1) = 3
    f.E = 2.0;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(CubicQuinticRules, ByDimension) {
    InvariantFacts f;
    f.model = ModelSpec::cubic_quintic(1.0, 0.5);
    f.P = 0.0;
    f.E = -1.0;
    f.M = 1.0;
    expect_precluded(classify(f), "R8.n1");
    f.P = 0.1;
    expect_precluded(classify(f), "R2");

    f.model = ModelSpec::cubic_quintic(1.0, 0.5, 2);
    f.P = 0.0;
    expect_precluded(classify(f), "R8.n2");

    f.model = ModelSpec::cubic_quintic(-1.0, -2.0, 3);
    f.E = 1.0; // bound 3/(128·2)·M ≈ 0.0117
    expect_precluded(classify(f), "R8.n3a");

    f.model = ModelSpec::cubic_quintic(1.0, 2.0, 3);
    f.E = -1.0;
    f.P_tilde0 = 0.2;
    expect_precluded(classify(f), "R8.n3b");
    f.P_tilde0 = -0.2;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(BiharmonicRules, SignRegimes) {
    InvariantFacts f;
    f.model = ModelSpec::biharmonic(1, 2.0, 0.5);
    expect_precluded(classify(f), "R9.a");
    f.model = ModelSpec::biharmonic(-1, 2.0, -1.0);
    f.E = 0.4;
    expect_precluded(classify(f), "R9.b");
    f.E = -0.4;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
    f.model = ModelSpec::biharmonic(-1, 2.0, 1.0);
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(DnlsRules, HamiltonianSignAndParity) {
    InvariantFacts f;
    f.model = ModelSpec::dnls(-1);
    f.H = -0.5;
    f.parity = Parity::None;
    expect_precluded(classify(f), "R10.a");
    f.model = ModelSpec::dnls(1);
    f.H = 0.5;
    expect_precluded(classify(f), "R10.b");
    f.H = -0.5;
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
    f.parity = Parity::Odd;
    expect_precluded(classify(f), "R10.parity");
    f.parity.reset();
    EXPECT_EQ(classify(f).status, VerdictStatus::Inconclusive);
}

TEST(LogRules, DefocusingLog) {
    InvariantFacts f;
    f.model = ModelSpec::log_nls(1);
    expect_precluded(classify(f), "R11");
    f.model = ModelSpec::log_nls(-1);
    EXPECT_EQ(classify(f).status, VerdictStatus::NotPrecluded);
}

TEST(Classifier, InconsistentFactsAreRejected) {
    auto f = power_facts(-1, 2.0);
    f.H = 1.0;
    EXPECT_THROW(classify(f), ParameterError);
    InvariantFacts d;
    d.model = ModelSpec::dnls(-1);
    d.E = 1.0;
    EXPECT_THROW(classify(d), ParameterError);
}

TEST(Classifier, VerdictJson) {
    auto f = power_facts(-1, 4.0);
    f.P = 0.0;
    f.E = 0.0;
    f.P_tilde0 = 0.5;
    const auto j = classify(f).to_json();
    EXPECT_EQ(j["status"], "Precluded");
    EXPECT_EQ(j["rule"], "R4.i");
    EXPECT_EQ(j["table_row"], "T2.5");
    EXPECT_DOUBLE_EQ(j["inputs"]["P_tilde0"].get<double>(), 0.5);
    EXPECT_TRUE(j.contains("inequality"));
}

// --- table fidelity -------------------------------------------------------------------------

TEST(TableFidelity, EveryRowTriggersExactlyItsRule) {
    std::set<std::string> seen;
    const auto cfg = full_config();
    for (const auto& row : table_rows()) {
        const auto v = classify(facts_for_row(row.row), cfg);
        EXPECT_EQ(v.status, VerdictStatus::Precluded) << row.row << " " << v.regime << v.inequality;
        EXPECT_EQ(v.table_row, row.row) << row.row << " fired " << v.rule;
        EXPECT_EQ(v.rule_family(), row.rule_family) << row.row;
        seen.insert(v.table_row.value_or("?"));
    }
    EXPECT_EQ(seen.size(), table_rows().size());
    EXPECT_EQ(table_rows().size(), 13u);
}

// --- catalog consistency -------------------------------------------------------------------

TEST(CatalogConsistency, BreathersAreNeverPrecluded) {
    Grid1D g(20.0, 2048);
    const auto sy = ExactSolution::satsuma_yajima();
    const auto cfg = full_config();
    EXPECT_NE(classify(facts_from_field(eval_exact(sy, 0.0, g), sy.model()), cfg).status,
              VerdictStatus::Precluded);

    const auto km = ExactSolution::kuznetsov_ma(1.0);
    Grid1D gk(40.0, 2048);
    for (double t : {0.0, 0.3}) {
        const auto v = classify(facts_from_field(eval_exact(km, t, gk), km.model(), {true}), cfg);
        EXPECT_EQ(v.status, VerdictStatus::NotPrecluded) << v.rule << " " << v.inequality;
    }

    const auto lb = ExactSolution::log_breather({1.0, 0.3});
    Grid1D gl(15.0, 1024);
    const auto v = classify(facts_from_field(eval_exact(lb, 0.0, gl), lb.model()), cfg);
    EXPECT_EQ(v.status, VerdictStatus::NotPrecluded);
}

// The time-aperiodic Peregrine solution has E_nz = M_nz = 0, where the
// cubic one-dimensional sign condition holds with equality.
TEST(CatalogConsistency, PeregrineMeetsTheCubicSignCondition) {
    Grid1D g(2000.0, 65536);
    const auto pe = ExactSolution::peregrine();
    const auto facts = facts_from_field(eval_exact(pe, 0.0, g), pe.model(), {true, TailCorrection::Algebraic});
    const auto v = classify(facts);
    EXPECT_EQ(v.status, VerdictStatus::Precluded);
    EXPECT_EQ(v.rule, "R7.cubic1");
    EXPECT_FALSE(exact_period(pe).has_value());
}

// --- robustness properties -------------------------------------------------------------------

namespace {

double random_value(std::mt19937_64& rng, bool positive = false) {
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> mag(-6.0, 1.0);
    if (pick(rng) == 0) return 0.0;
    const double v = std::pow(10.0, mag(rng));
    return positive || pick(rng) % 2 ? v : -v;
}

InvariantFacts random_facts(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> fam(0, 5), sign(0, 1);
    const int eps = sign(rng) ? 1 : -1;
    InvariantFacts f;
    switch (fam(rng)) {
    case 0: {
        const double ps[] = {2.0, 3.0, 4.0, 6.0};
        f.model = ModelSpec::power(eps, ps[std::uniform_int_distribution<int>(0, 3)(rng)]);
        break;
    }
    case 1: f.model = ModelSpec::gross_pitaevskii(eps, sign(rng) ? 2.0 : 4.0, sign(rng) ? 1 : 2); break;
    case 2: f.model = ModelSpec::cubic_quintic(eps, eps * 0.5, 1 + sign(rng) + sign(rng)); break;
    case 3: f.model = ModelSpec::biharmonic(eps, 2.0, random_value(rng)); break;
    case 4: f.model = ModelSpec::dnls(eps); break;
    default: f.model = ModelSpec::log_nls(eps); break;
    }
    f.M = std::max(1e-6, std::abs(random_value(rng, true)) * 10.0 < 10.0 ? std::abs(random_value(rng, true)) : 1.0);
    if (f.model.family == Family::GrossPitaevskii) f.M = random_value(rng);
    if (f.model.family == Family::DerivativeNLS) {
        f.H = random_value(rng);
        f.parity = sign(rng) ? Parity::None : Parity::Even;
    } else {
        f.E = random_value(rng);
    }
    f.P = random_value(rng);
    f.P_tilde0 = random_value(rng);
    f.grad_l2_at_0 = std::abs(random_value(rng, true));
    f.l2_norm = std::abs(random_value(rng, true)) * 3.0;
    f.decay_certificate = sign(rng);
    return f;
}

} // namespace

TEST(Robustness, VerdictsStableUnderZeroThreshold) {
    std::mt19937_64 rng(2024);
    auto base = full_config();
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const auto f = random_facts(rng);
        std::optional<RegimeVerdict> ref;
        for (double tau : {1e-11, 1e-10, 1e-9, 1e-8, 1e-7}) {
            auto cfg = base;
            cfg.tau0 = tau;
            const auto v = classify(f, cfg);
            if (!ref) {
                ref = v;
                continue;
            }
            EXPECT_EQ(v.status, ref->status) << "tau0=" << tau << " " << v.rule << " vs " << ref->rule;
            EXPECT_EQ(v.rule, ref->rule);
        }
        ++checked;
    }
    EXPECT_EQ(checked, 3000);
}

TEST(Robustness, OrderIndependenceForDisjointGuards) {
    std::mt19937_64 rng(99);
    const auto cfg = full_config();
    int multi = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto f = random_facts(rng);
        auto rules = rules_for(f.model);
        std::vector<std::string> holding;
        for (const auto& r : rules)
            if (r.eval(f, cfg).outcome == RuleOutcome::Holds) holding.push_back(r.id);
        const auto ref = evaluate_rules(rules, f, cfg);
        if (holding.size() > 1) {
            ++multi;
            continue;
        }
        for (int k = 0; k < 4; ++k) {
            std::shuffle(rules.begin(), rules.end(), rng);
            const auto v = evaluate_rules(rules, f, cfg);
            EXPECT_EQ(v.status, ref.status);
            if (ref.status != VerdictStatus::Inconclusive) {
                EXPECT_EQ(v.rule, ref.rule);
            }
        }
    }
    EXPECT_LT(multi, 2000);
}

// --- trajectories -----------------------------------------------------------------------------

namespace {

EvolveConfig run_config(const ModelSpec& m, double t_end, int stride) {
    EvolveConfig c;
    c.dt = 1e-4;
    c.t_end = t_end;
    c.sample_stride = stride;
    c.scheme = EvolveConfig::default_scheme(m);
    return c;
}

Field1D gaussian(const Grid1D& g, double amp) {
    return sample_field(g, BackgroundKind::Zero, 0.0, [&](double x) { return cplx(amp * std::exp(-x * x)); });
}

} // namespace

TEST(ClassifyTrajectory, DefocusingGaussian) {
    Grid1D g(30.0, 1024);
    const auto m = ModelSpec::power(1, 2.0);
    const auto traj = evolve(gaussian(g, 1.0), m, run_config(m, 1.0, 100));
    const auto v = classify_trajectory(traj, m);
    expect_precluded(v, "R1");
    EXPECT_EQ(v.monotone_fraction, 1.0);
}

TEST(ClassifyTrajectory, SatsumaYajimaRun) {
    Grid1D g(20.0, 2048);
    const auto sy = ExactSolution::satsuma_yajima();
    const auto traj = evolve(eval_exact(sy, 0.0, g), sy.model(), run_config(sy.model(), 1.0, 50));
    const auto v = classify_trajectory(traj, sy.model());
    EXPECT_EQ(v.status, VerdictStatus::NotPrecluded) << v.rule << v.inequality;
    EXPECT_LT(*v.monotone_fraction, 0.8);
}

TEST(ClassifyTrajectory, SupercriticalBlowUp) {
    Grid1D g(20.0, 1024);
    const auto m = ModelSpec::power(-1, 6.0);
    const auto u0 = gaussian(g, 1.5);
    ASSERT_LT(energy(u0, m), 0.0);
    const auto traj = evolve(u0, m, run_config(m, 1.0, 10));
    const auto v = classify_trajectory(traj, m);
    expect_precluded(v, "R3.3");
    EXPECT_EQ(v.table_row, "T3.3");
    ASSERT_TRUE(v.blowup_time);
}

TEST(ClassifyTrajectory, LargeDriftIsInconclusive) {
    TrajectoryDiagnostics traj;
    for (int i = 0; i < 3; ++i) {
        InvariantReport r;
        r.m = 1.0 + 0.1 * i;
        r.e = -1.0;
        r.p = 0.0;
        traj.times.push_back(i);
        traj.reports.push_back(r);
        traj.virial.push_back(0.0);
    }
    traj.virial_name = "p_tilde";
    const auto v = classify_trajectory(traj, ModelSpec::power(-1, 2.0));
    EXPECT_EQ(v.status, VerdictStatus::Inconclusive);
    EXPECT_EQ(v.rule, "drift");
    EXPECT_NE(v.inequality.find("drift(m)"), std::string::npos);
}
