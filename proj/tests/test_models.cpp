#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nsm/errors.hpp"
#include "nsm/models.hpp"
#include "oracles.hpp"

using namespace nsm;

namespace {

const NelsonSiegelParams kP1{0.05, -0.02, 0.01, 0.5};
const NelsonSiegelParams kP2{0.04, 0.01, -0.03, 1.2};
const NelsonSiegelParams kP3{0.06, -0.03, 0.02, 0.3};

std::vector<NelsonSiegelParams> param_sets() { return {kP1, kP2, kP3}; }

double rel(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

}  // namespace

// ---- Ho-Lee ----

TEST(HoLeeTheta, AtZero) {
    HoLeeModel m(0.01, kP1);
    EXPECT_DOUBLE_EQ(m.theta(0.0), kP1.z3 - kP1.z2 * kP1.lambda);
}

TEST(HoLeeTheta, SubstitutionExample) {
    HoLeeModel m(0.01, kP1);
    EXPECT_NEAR(m.theta(2.0), 0.0002 + 0.01 * std::exp(-1.0), 1e-16);
}

TEST(HoLeeTheta, MatchesSlopeOfInitialCurve) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.013, p);
        for (double t : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
            const double want = oracle::hl_theta_reference(m, t);
            EXPECT_LT(std::abs(m.theta(t) - want) / std::max(1e-3, std::abs(want)), 1e-6) << t;
        }
    }
}

TEST(HoLeeTheta, NegativeTimeThrows) { EXPECT_THROW(HoLeeModel(0.01, kP1).theta(-0.1), DomainError); }

TEST(HoLeeModel, RejectsNegativeSigmaAndBadCurve) {
    EXPECT_THROW(HoLeeModel(-0.01, kP1), std::invalid_argument);
    EXPECT_THROW(HoLeeModel(0.01, NelsonSiegelParams{0.05, 0.0, 0.0, -1.0}), std::invalid_argument);
}

TEST(HoLeeModel, ShortRateFromCurve) { EXPECT_DOUBLE_EQ(HoLeeModel(0.01, kP1).r0(), 0.03); }

TEST(HoLeeAffine, Trivial) {
    HoLeeModel m(0.01, kP1);
    const auto at_t = m.affine(3.0, 3.0);
    EXPECT_EQ(at_t.A, 0.0);
    EXPECT_EQ(at_t.B, 0.0);
    EXPECT_DOUBLE_EQ(m.affine(0.0, 5.0).B, 5.0);
    EXPECT_DOUBLE_EQ(m.bond_price(2.0, 2.0, 0.07), 1.0);
}

TEST(HoLeeAffine, MatchesQuadrature) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.01, p);
        for (auto [t, T] : std::vector<std::pair<double, double>>{{1, 3}, {0, 5}, {0.5, 10}, {4, 30}}) {
            EXPECT_LT(rel(m.affine(t, T).A, oracle::hl_A_quadrature(m, t, T)), 1e-8) << t << " " << T;
        }
    }
}

TEST(HoLeeAffine, ErrorsOnBadTimes) {
    HoLeeModel m(0.01, kP1);
    EXPECT_THROW(m.affine(-1.0, 2.0), DomainError);
    EXPECT_THROW(m.affine(3.0, 2.0), DomainError);
}

TEST(HoLeeBond, InitialDiscountCurve) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.02, p);
        for (double T : {0.5, 2.0, 10.0, 30.0}) {
            EXPECT_LT(rel(m.bond_price(0.0, T, m.r0()), oracle::initial_discount(p, T)), 1e-8);
        }
    }
}

TEST(HoLeeBond, DecreasingInShortRate) {
    HoLeeModel m(0.01, kP1);
    double prev = 2.0;
    for (double r = -0.02; r <= 0.1; r += 0.01) {
        const double price = m.bond_price(1.0, 4.0, r);
        EXPECT_GT(price, 0.0);
        EXPECT_LT(price, prev);
        prev = price;
    }
}

TEST(HoLeeForward, RecoversInitialCurveAtZero) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.01, p);
        const auto c = m.forward_curve(0.0, m.r0()).coefficients();
        ASSERT_EQ(c.size(), 4u);
        EXPECT_NEAR(c[0], 0.0, 1e-14);
        EXPECT_NEAR(c[1], p.z1, 1e-14);
        EXPECT_NEAR(c[2], p.z2, 1e-14);
        EXPECT_NEAR(c[3], p.z3, 1e-14);
    }
}

TEST(HoLeeForward, TauExpCoefficient) {
    HoLeeModel m(0.01, kP1);
    EXPECT_NEAR(m.forward_curve(2.0, 0.04).coefficients()[3], 0.01 * std::exp(-1.0), 1e-16);
}

TEST(HoLeeForward, MatchesBondPriceDifferences) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.012, p);
        for (double t = 0.0; t <= 5.0; t += 0.5) {
            const double r_t = m.short_rate_moments(t).mean + 0.004;
            const auto curve = m.forward_curve(t, r_t);
            for (double tau = 0.0; tau <= 30.0; tau += 0.25) {
                const double f = eval_curve(curve, tau);
                const double fd = oracle::forward_from_prices(m, t, tau, r_t);
                EXPECT_LT(std::abs(f - fd) / (1 + std::abs(f)), 1e-6) << t << " " << tau;
            }
        }
    }
}

TEST(HoLeeForward, PinnedToShortRate) {
    HoLeeModel m(0.01, kP2);
    for (double t : {0.0, 0.7, 3.0, 12.0})
        for (double r : {-0.01, 0.0, 0.035, 0.12}) EXPECT_NEAR(eval_curve(m.forward_curve(t, r), 0.0), r, 1e-12);
}

TEST(HoLeeForward, ZeroVolatilityRollsInitialCurve) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.0, p);
        for (double t : {0.0, 1.0, 4.5, 10.0}) {
            const auto curve = m.forward_curve(t, m.short_rate_moments(t).mean);
            for (double tau = 0.0; tau <= 30.0; tau += 1.5) EXPECT_NEAR(eval_curve(curve, tau), eval_ns(p, t + tau), 1e-10);
        }
    }
}

TEST(HoLeeMoments, Trivial) {
    HoLeeModel m(0.01, kP1);
    const auto at0 = m.short_rate_moments(0.0);
    EXPECT_EQ(at0.mean, m.r0());
    EXPECT_EQ(at0.variance, 0.0);
    EXPECT_NEAR(m.short_rate_moments(4.0).variance, 4e-4, 1e-18);
}

TEST(HoLeeMoments, MeanIsIntegratedDrift) {
    for (const auto& p : param_sets()) {
        HoLeeModel m(0.015, p);
        for (double t : {0.5, 1.0, 5.0, 10.0}) {
            const double want = m.r0() + oracle::quad([&](double s) { return m.theta(s); }, 0.0, t);
            EXPECT_NEAR(m.short_rate_moments(t).mean, want, 1e-13);
        }
    }
}

TEST(HoLeeMoments, Transition) {
    HoLeeModel m(0.01, kP1);
    const auto tr = m.transition(1.0, 0.045, 3.0);
    EXPECT_NEAR(tr.mean, 0.045 + oracle::quad([&](double s) { return m.theta(s); }, 1.0, 3.0), 1e-14);
    EXPECT_NEAR(tr.variance, 2e-4, 1e-18);
    EXPECT_THROW(m.transition(2.0, 0.0, 1.0), DomainError);
}

TEST(HoLeeMusiela, DriftMatchesVolatilityIntegral) {
    HoLeeModel m(0.01, kP1);
    for (double tau : {0.25, 1.0, 7.0, 30.0}) {
        EXPECT_NEAR(m.musiela_drift_addon(tau), 1e-4 * tau, 1e-18);
        const double q = m.musiela_volatility(tau) * oracle::quad([&](double s) { return m.musiela_volatility(s); }, 0, tau);
        EXPECT_LT(rel(m.musiela_drift_addon(tau), q), 1e-8);
    }
    EXPECT_EQ(m.musiela_drift_addon(0.0), 0.0);
}

// ---- Hull-White ----

TEST(HullWhiteModel, RejectsCollidingRates) {
    EXPECT_THROW(HullWhiteModel(0.5, 0.01, kP1), DegenerateParametersError);
    EXPECT_THROW(HullWhiteModel(0.25, 0.01, kP1), DegenerateParametersError);
    EXPECT_NO_THROW(HullWhiteModel(0.1, 0.01, kP1));
}

TEST(HullWhiteModel, RejectsBadParameters) {
    EXPECT_THROW(HullWhiteModel(0.0, 0.01, kP1), std::invalid_argument);
    EXPECT_THROW(HullWhiteModel(-0.1, 0.01, kP1), std::invalid_argument);
    EXPECT_THROW(HullWhiteModel(0.1, -0.01, kP1), std::invalid_argument);
}

TEST(HullWhiteTheta, AtZero) {
    HullWhiteModel m(0.1, 0.01, kP1);
    const auto& p = kP1;
    EXPECT_NEAR(m.theta(0.0), 0.1 * p.z1 + p.z3 - p.z2 * p.lambda + 0.1 * p.z2, 1e-16);
}

TEST(HullWhiteTheta, MatchesDefiningRelation) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.1, 0.01, p);
        for (double t : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
            const double want = oracle::hw_theta_reference(m, t);
            EXPECT_LT(std::abs(m.theta(t) - want) / std::max(1e-3, std::abs(want)), 1e-6) << t;
        }
    }
}

TEST(HullWhiteTheta, VolatilityTermAsymptote) {
    const NelsonSiegelParams flat{0.05, 0.0, 0.0, 0.5};
    HullWhiteModel with(0.1, 0.01, flat);
    HullWhiteModel without(0.1, 0.0, flat);
    EXPECT_NEAR(with.theta(400.0) - without.theta(400.0), 5e-4, 1e-15);
}

TEST(HullWhiteAlpha, Examples) {
    HullWhiteModel m(0.1, 0.01, kP1);
    EXPECT_DOUBLE_EQ(m.alpha(0.0), kP1.z1 + kP1.z2);
    EXPECT_NEAR(m.alpha(10.0), eval_ns(kP1, 10.0) + (1e-4 / 0.02) * std::pow(1 - std::exp(-1.0), 2), 1e-16);
    HullWhiteModel flat(0.1, 0.0, kP1);
    for (double t : {0.0, 1.0, 6.0}) EXPECT_DOUBLE_EQ(flat.alpha(t), eval_ns(kP1, t));
}

TEST(HullWhiteAffine, Trivial) {
    HullWhiteModel m(0.1, 0.01, kP1);
    EXPECT_EQ(m.affine(2.0, 2.0).A, 0.0);
    EXPECT_EQ(m.affine(2.0, 2.0).B, 0.0);
    EXPECT_NEAR(m.affine(0.0, 10.0).B, 10.0 * (1 - std::exp(-1.0)), 1e-14);
    EXPECT_DOUBLE_EQ(m.bond_price(4.0, 4.0, 0.1), 1.0);
}

TEST(HullWhiteAffine, MatchesQuadrature) {
    for (const auto& p : param_sets()) {
        for (double a : {0.1, 0.35}) {
            HullWhiteModel m(a, 0.01, p);
            for (auto [t, T] : std::vector<std::pair<double, double>>{{1, 3}, {0, 5}, {0.5, 10}, {4, 30}}) {
                EXPECT_LT(rel(m.affine(t, T).A, oracle::hw_A_quadrature(m, t, T)), 1e-8) << a << " " << t << " " << T;
            }
        }
    }
}

TEST(HullWhiteBond, InitialDiscountCurve) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.1, 0.015, p);
        for (double T : {0.5, 2.0, 10.0, 30.0}) {
            EXPECT_LT(rel(m.bond_price(0.0, T, m.r0()), oracle::initial_discount(p, T)), 1e-8);
        }
    }
}

TEST(HullWhiteBond, DecreasingInShortRate) {
    HullWhiteModel m(0.1, 0.01, kP1);
    double prev = 2.0;
    for (double r = -0.02; r <= 0.1; r += 0.01) {
        const double price = m.bond_price(1.0, 4.0, r);
        EXPECT_LT(price, prev);
        prev = price;
    }
}

TEST(HullWhiteForward, RecoversInitialCurveAtZero) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.1, 0.01, p);
        const auto c = m.forward_curve(0.0, m.r0()).coefficients();
        ASSERT_EQ(c.size(), 5u);
        EXPECT_NEAR(c[0], 0.0, 1e-14);
        EXPECT_NEAR(c[1], 0.0, 1e-14);
        EXPECT_NEAR(c[2], p.z1, 1e-14);
        EXPECT_NEAR(c[3], p.z2, 1e-14);
        EXPECT_NEAR(c[4], p.z3, 1e-14);
    }
}

TEST(HullWhiteForward, SecondCoefficient) {
    HullWhiteModel m(0.1, 0.01, kP1);
    EXPECT_NEAR(m.forward_curve(5.0, 0.03).coefficients()[1], 5e-3 * (std::exp(-1.0) - 1), 1e-17);
}

TEST(HullWhiteForward, MatchesBondPriceDifferences) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.17, 0.012, p);
        for (double t = 0.0; t <= 5.0; t += 0.5) {
            const double r_t = m.short_rate_moments(t).mean - 0.006;
            const auto curve = m.forward_curve(t, r_t);
            for (double tau = 0.0; tau <= 30.0; tau += 0.25) {
                const double f = eval_curve(curve, tau);
                const double fd = oracle::forward_from_prices(m, t, tau, r_t);
                EXPECT_LT(std::abs(f - fd) / (1 + std::abs(f)), 1e-6) << t << " " << tau;
            }
        }
    }
}

TEST(HullWhiteForward, PinnedToShortRate) {
    HullWhiteModel m(0.1, 0.01, kP3);
    for (double t : {0.0, 0.7, 3.0, 12.0})
        for (double r : {-0.01, 0.0, 0.035, 0.12}) EXPECT_NEAR(eval_curve(m.forward_curve(t, r), 0.0), r, 1e-12);
}

TEST(HullWhiteForward, ZeroVolatilityRollsInitialCurve) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.1, 0.0, p);
        for (double t : {0.0, 1.0, 4.5, 10.0}) {
            const auto curve = m.forward_curve(t, m.short_rate_moments(t).mean);
            for (double tau = 0.0; tau <= 30.0; tau += 1.5) EXPECT_NEAR(eval_curve(curve, tau), eval_ns(p, t + tau), 1e-10);
        }
    }
}

TEST(HullWhiteMoments, Trivial) {
    HullWhiteModel m(0.1, 0.01, kP1);
    const auto at0 = m.short_rate_moments(0.0);
    EXPECT_DOUBLE_EQ(at0.mean, m.r0());
    EXPECT_EQ(at0.variance, 0.0);
    EXPECT_NEAR(m.short_rate_moments(500.0).variance, 1e-4 / 0.2, 1e-18);
}

TEST(HullWhiteMoments, MatchVariationOfConstants) {
    for (const auto& p : param_sets()) {
        HullWhiteModel m(0.2, 0.01, p);
        for (double t : {0.5, 1.0, 5.0, 10.0}) {
            const double a = m.a();
            const double mean = m.r0() * std::exp(-a * t) +
                                oracle::quad([&](double s) { return std::exp(-a * (t - s)) * m.theta(s); }, 0.0, t);
            const double var = 1e-4 * oracle::quad([&](double s) { return std::exp(-2 * a * (t - s)); }, 0.0, t);
            const auto mom = m.short_rate_moments(t);
            EXPECT_NEAR(mom.mean, mean, 1e-13);
            EXPECT_LT(rel(mom.variance, var), 1e-12);
        }
    }
}

TEST(HullWhiteMoments, TransitionComposes) {
    HullWhiteModel m(0.1, 0.01, kP2);
    const auto direct = m.transition(0.0, m.r0(), 4.0);
    const auto first = m.transition(0.0, m.r0(), 1.5);
    const double decay = std::exp(-0.1 * 2.5);
    const auto second = m.transition(1.5, first.mean, 4.0);
    EXPECT_NEAR(second.mean, direct.mean, 1e-15);
    EXPECT_NEAR(second.variance + decay * decay * first.variance, direct.variance, 1e-18);
    EXPECT_NEAR(direct.mean, m.short_rate_moments(4.0).mean, 1e-15);
}

TEST(HullWhiteMusiela, DriftMatchesVolatilityIntegral) {
    HullWhiteModel m(0.1, 0.01, kP1);
    for (double tau : {0.25, 1.0, 7.0, 30.0}) {
        const double e = std::exp(-0.1 * tau);
        EXPECT_NEAR(m.musiela_drift_addon(tau), 1e-3 * e * (1 - e), 1e-18);
        const double q = m.musiela_volatility(tau) * oracle::quad([&](double s) { return m.musiela_volatility(s); }, 0, tau);
        EXPECT_LT(rel(m.musiela_drift_addon(tau), q), 1e-8);
    }
}

// ---- variant dispatch ----

TEST(ShortRateModel, DispatchMatchesConcreteModel) {
    ShortRateModel hl = HoLeeModel(0.01, kP1);
    ShortRateModel hw = HullWhiteModel(0.1, 0.02, kP2);
    EXPECT_EQ(kind_of(hl), ModelKind::ho_lee);
    EXPECT_EQ(kind_of(hw), ModelKind::hull_white);
    EXPECT_EQ(model_kind_name(kind_of(hw)), "hull_white");
    EXPECT_EQ(sigma(hw), 0.02);
    EXPECT_DOUBLE_EQ(r0(hl), 0.03);
    EXPECT_EQ(bond_price(hw, 1, 3, 0.04), std::get<HullWhiteModel>(hw).bond_price(1, 3, 0.04));
    EXPECT_EQ(manifold_basis(hl), FactorBasis::ho_lee(0.5));
    EXPECT_EQ(manifold_basis(hw).size(), 5u);
}

TEST(IntegratedNs, MatchesQuadrature) {
    for (const auto& p : param_sets())
        for (double T : {0.0, 0.1, 3.0, 30.0})
            EXPECT_NEAR(integrated_ns(p, T), oracle::quad([&](double s) { return eval_ns(p, s); }, 0, T), 1e-14);
}
