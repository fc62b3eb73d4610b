#include <gtest/gtest.h>

#include <cmath>

#include "bpgof/error.hpp"
#include "bpgof/estimate.hpp"
#include "bpgof/mvariate.hpp"

using namespace bpgof;

namespace {

QuadratureGrid grid(int order, const WeightExponents& a) { return QuadratureGrid(order, a.values()); }

} // namespace

TEST(ThirdOrderTerm, MatchesModelPgfPartial) {
    const ThetaTP t(1.2, 0.9, 1.5, 0.35);
    const ThetaMV mv = t.to_mv();
    for (double u1 : {0.0, 0.3, 1.0}) {
        for (double u2 : {0.1, 0.7}) {
            for (double u3 : {0.0, 0.5, 1.0}) {
                const double u[3] = {u1, u2, u3};
                const double ratio = pgf_m_partial(u, mv, 7u) / pgf_m(u, mv);
                EXPECT_NEAR(third_order_term({u1, u2, u3}, t), ratio, 1e-13);
            }
        }
    }
}

TEST(TrivariateResiduals, VanishUnderInjection) {
    const ThetaTP t(1.2, 0.9, 1.5, 0.35);
    const ModelPgf g(t.to_mv());
    Stream s(41);
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 3> u{s.uniform(), s.uniform(), s.uniform()};
        for (double v : residuals_D3(g, t, u)) EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(TrivariateResiduals, FaceReducesToBivariate) {
    Stream s(42);
    const CountSample x = sample_tp(ThetaTP(1.0, 1.3, 0.8, 0.3), 60, s);
    const ThetaTP t(1.1, 1.2, 0.9, 0.25);
    const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    // D4 pairs (1,2), D5 pairs (1,3), D6 pairs (2,3).
    for (int k = 0; k < 3; ++k) {
        const CountSample p = x.project(axes[k]);
        const ThetaBP bt(t.theta(axes[k][0] + 1), t.theta(axes[k][1] + 1), t.theta(4));
        for (double a : {0.1, 0.5, 0.9}) {
            for (double b : {0.2, 0.8}) {
                std::array<double, 3> u{1.0, 1.0, 1.0};
                u[static_cast<std::size_t>(axes[k][0])] = a;
                u[static_cast<std::size_t>(axes[k][1])] = b;
                const auto d3 = residuals_D3(x, t, u);
                const auto d2 = residuals_D(p, bt, {a, b});
                EXPECT_NEAR(d3[static_cast<std::size_t>(3 + k)], d2[2], 1e-12) << "pair " << k;
            }
        }
    }
}

TEST(EmpiricalPgf, ThirdOrderPartialByFiniteDifference) {
    Stream s(43);
    const CountSample x = sample_tp(ThetaTP(1.0, 1.3, 0.8, 0.3), 40, s);
    const EmpiricalPgf g(x);
    const double h = 1e-6;
    for (double u1 : {0.2, 0.7}) {
        for (double u3 : {0.3, 0.9}) {
            const double up[3] = {u1, 0.5, u3 + h}, dn[3] = {u1, 0.5, u3 - h}, at[3] = {u1, 0.5, u3};
            const double fd = (g.partial(up, 3u) - g.partial(dn, 3u)) / (2 * h);
            EXPECT_NEAR(g.partial(at, 7u), fd, 1e-5);
        }
    }
}

TEST(T3Statistic, NonNegativeAndConvergedAtExactOrder) {
    Stream s(44);
    const WeightExponents a{0, 0, 0};
    for (int r = 0; r < 10; ++r) {
        const CountSample x = sample_tp(ThetaTP(1, 1, 1, 0.25), 50, s);
        const ThetaTP th = moment_estimate(x).theta_tp();
        const int exact = exact_quadrature_order(x.support());
        const double v0 = T3_stat(x, th, a, grid(exact, a)).value;
        const double v1 = T3_stat(x, th, a, grid(exact + 6, a)).value;
        EXPECT_GE(v0, 0.0);
        EXPECT_NEAR(v0, v1, 1e-10 * (1.0 + v1));
    }
}

TEST(T3Statistic, InjectedIntegralVanishes) {
    const ThetaTP t(1.2, 0.9, 1.5, 0.35);
    const WeightExponents a{0, 1, 0};
    EXPECT_NEAR(T3_integral(ModelPgf(t.to_mv()), t, grid(12, a)), 0.0, 1e-24);
}

TEST(MVariate, BivariateReduction) {
    Stream s(45);
    const WeightExponents a{0, 0};
    for (int r = 0; r < 10; ++r) {
        const CountSample x = sample_bp(ThetaBP(1.0, 1.0, 0.25), 50, s);
        const ThetaBP th = moment_estimate(x).theta_bp();
        const QuadratureGrid q = grid(16, a);
        EXPECT_EQ(Wm_stat(x, th.to_mv()).value, W_stat(x, th).value);
        EXPECT_EQ(Rm_stat(x, th.to_mv(), a, q).value, R_stat(x, th, a, q).value);
        EXPECT_EQ(Sm_stat(x, th.to_mv(), a, q).value, S_stat(x, th, a, q).value);
    }
}

TEST(MVariate, TrivariateStatisticsNonNegative) {
    Stream s(46);
    const WeightExponents a{0, 0, 0};
    const CountSample x = sample_tp(ThetaTP(1, 1, 1, 0.25), 50, s);
    const ThetaTP th = moment_estimate(x).theta_tp();
    EXPECT_GE(R3_stat(x, th, a, grid(24, a)).value, 0.0);
    EXPECT_GE(S3_stat(x, th, a, grid(exact_quadrature_order(x.support()), a)).value, 0.0);
    EXPECT_GE(W3_stat(x, th).value, 0.0);
}

TEST(MVariate, DimensionMismatchThrows) {
    Stream s(47);
    const CountSample x = sample_bp(ThetaBP(1.0, 1.0, 0.25), 10, s);
    EXPECT_THROW(Wm_stat(x, ThetaMV({1, 1, 1, 0.2})), DomainError);
}
