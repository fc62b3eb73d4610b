#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bpgof/error.hpp"
#include "bpgof/model.hpp"

using namespace bpgof;

namespace {

ThetaBP random_theta(Stream& s, double scale = 3.0) {
    const double t3 = 0.01 + scale * 0.5 * s.uniform();
    const double t1 = t3 + 0.01 + scale * s.uniform();
    const double t2 = t3 + 0.01 + scale * s.uniform();
    return ThetaBP(t1, t2, t3);
}

} // namespace

TEST(Theta, DomainChecks) {
    EXPECT_THROW(ThetaBP(1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(ThetaBP(0.5, 1.0, 0.5), DomainError);
    EXPECT_THROW(ThetaBP(1.0, 1.0, -0.1), DomainError);
    EXPECT_NO_THROW(ThetaBP(1.0, 1.0, 0.5));
    EXPECT_THROW(ThetaTP(1, 1, 0.2, 0.25), DomainError);
    EXPECT_THROW(ThetaMV({1.0, 0.5}), DomainError);
    const ThetaBP t(1.5, 1.0, 0.5);
    EXPECT_DOUBLE_EQ(t.reduced1(), 1.0);
    EXPECT_DOUBLE_EQ(t.reduced2(), 0.5);
}

TEST(CountSample, Validation) {
    EXPECT_THROW(CountSample(2, {}), DomainError);
    EXPECT_THROW(CountSample(2, {1, 2, 3}), DomainError);
    EXPECT_THROW(CountSample(2, {1, -1}), DomainError);
    EXPECT_THROW(CountSample(4, {1, 1, 1, 1}), DomainError);
    const CountSample s(2, {1, 2, 0, 0, 1, 2});
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s(1, 1), 0);
    EXPECT_EQ(s.support().distinct(), 2u);
    EXPECT_EQ(s.support().max_count[1], 2);
}

TEST(CountSample, ConcatAndProject) {
    const CountSample a(3, {1, 2, 3, 4, 5, 6});
    const CountSample b(3, {7, 8, 9});
    const CountSample c = a.concat(b);
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c(2, 2), 9);
    const int axes[2] = {0, 2};
    const CountSample p = c.project(axes);
    EXPECT_EQ(p.dim(), 2);
    EXPECT_EQ(p(1, 1), 6);
}

TEST(PgfBP, Examples) {
    const ThetaBP t(1.0, 1.0, 0.5);
    EXPECT_DOUBLE_EQ(pgf_bp({1.0, 1.0}, t), 1.0);
    EXPECT_NEAR(pgf_bp({0.0, 0.0}, t), std::exp(-1.5), 1e-15);
    EXPECT_NEAR(pgf_bp({0.0, 0.0}, t), 0.223130, 1e-6);
    EXPECT_NEAR(pgf_bp({0.5, 0.5}, t), std::exp(-0.875), 1e-15);
    EXPECT_NEAR(pgf_bp({0.5, 0.5}, t), 0.416862, 1e-6);
}

TEST(PgfBP, NormalizationExactForAnyTheta) {
    Stream s(11);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(pgf_bp({1.0, 1.0}, random_theta(s)), 1.0);
}

TEST(PgfTP, Examples) {
    const ThetaTP t(1.0, 1.0, 1.0, 0.5);
    EXPECT_DOUBLE_EQ(pgf_tp({1.0, 1.0, 1.0}, t), 1.0);
    EXPECT_NEAR(pgf_tp({0.0, 0.0, 0.0}, t), std::exp(-2.0), 1e-15);
}

TEST(PgfM, ReducesToBivariate) {
    Stream s(12);
    for (int i = 0; i < 200; ++i) {
        const ThetaBP t = random_theta(s);
        const double u[2] = {s.uniform(), s.uniform()};
        EXPECT_NEAR(pgf_m(u, t.to_mv()), pgf_bp({u[0], u[1]}, t), 1e-15);
    }
}

TEST(PgfM, PartialsMatchFiniteDifferences) {
    const ThetaMV t({1.3, 0.9, 1.1, 0.4});
    const double u[3] = {0.3, 0.6, 0.8};
    const double h = 1e-4;
    for (int k = 0; k < 3; ++k) {
        double up[3] = {u[0], u[1], u[2]}, dn[3] = {u[0], u[1], u[2]};
        up[k] += h;
        dn[k] -= h;
        EXPECT_NEAR(pgf_m_partial(u, t, 1u << k), (pgf_m(up, t) - pgf_m(dn, t)) / (2 * h), 1e-8);
    }
    // Mixed partial over axes 0 and 1.
    auto g = [&](double a, double b) {
        const double v[3] = {a, b, u[2]};
        return pgf_m(v, t);
    };
    const double fd = (g(u[0] + h, u[1] + h) - g(u[0] + h, u[1] - h) - g(u[0] - h, u[1] + h) + g(u[0] - h, u[1] - h)) /
                      (4 * h * h);
    EXPECT_NEAR(pgf_m_partial(u, t, 3u), fd, 1e-6);
}

TEST(PmfConvolution, Examples) {
    const ThetaBP t(1.0, 1.0, 0.5);
    EXPECT_NEAR(pmf_bp_convolution(0, 0, t), std::exp(-1.5), 1e-16);
    EXPECT_NEAR(pmf_bp_convolution(1, 0, t), 0.5 * std::exp(-1.5), 1e-16);
    EXPECT_NEAR(pmf_bp_convolution(1, 0, t), 0.111565, 1e-6);
}

TEST(PmfConvolution, TruncatedMassIsOne) {
    const ThetaBP t(1.5, 1.0, 0.5);
    double mass = 0.0;
    for (int i = 0; i <= 50; ++i) {
        for (int j = 0; j <= 50; ++j) mass += pmf_bp_convolution(i, j, t);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(PmfRecurrence, Examples) {
    const ThetaBP t(1.0, 1.0, 0.5);
    EXPECT_NEAR(pmf_bp_recurrence(0, 0, t), std::exp(-1.5), 1e-16);
    EXPECT_NEAR(pmf_bp_recurrence(1, 1, t), 0.75 * std::exp(-1.5), 1e-16);
    EXPECT_NEAR(pmf_bp_recurrence(1, 1, t), 0.167348, 1e-6);
}

TEST(PmfRecurrence, MatchesConvolution) {
    Stream s(13);
    for (int rep = 0; rep < 200; ++rep) {
        const ThetaBP t = random_theta(s);
        const PmfTableBP table(25, 25, t);
        for (int i = 0; i <= 25; ++i) {
            for (int j = 0; j <= 25; ++j) ASSERT_NEAR(table(i, j), pmf_bp_convolution(i, j, t), 1e-12);
        }
    }
}

TEST(PmfRecurrence, MarginsArePoisson) {
    const ThetaBP t(2.0, 1.5, 0.7);
    const PmfTableBP table(60, 60, t);
    for (int i = 0; i <= 15; ++i) {
        double row = 0.0;
        for (int j = 0; j <= 60; ++j) row += table(i, j);
        EXPECT_NEAR(row, poisson_pmf(i, 2.0), 1e-10);
    }
}

TEST(PmfRecurrence, PgfConsistency) {
    const ThetaBP t(2.5, 3.0, 1.2);
    const PmfTableBP table(60, 60, t);
    const double u1 = 0.7, u2 = 0.4;
    double acc = 0.0;
    for (int i = 0; i <= 60; ++i) {
        for (int j = 0; j <= 60; ++j) acc += table(i, j) * std::pow(u1, i) * std::pow(u2, j);
    }
    EXPECT_NEAR(acc, pgf_bp({u1, u2}, t), 1e-8);
}

TEST(PmfRecurrence, LogFallbackForLargeMeans) {
    // e^{-theta} underflows the linear-space start cell.
    const ThetaBP t(400.0, 380.0, 5.0);
    const PmfTableBP table(420, 400, t);
    EXPECT_TRUE(table.used_log_fallback());
    EXPECT_NEAR(table(400, 380) / pmf_bp_convolution(400, 380, t), 1.0, 1e-9);
}

TEST(PmfTP, SumsToOneAndMatchesPgfAtZero) {
    const ThetaTP t(1.0, 1.2, 0.8, 0.3);
    EXPECT_NEAR(pmf_tp({0, 0, 0}, t), pgf_tp({0, 0, 0}, t), 1e-15);
    double mass = 0.0;
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            for (int k = 0; k <= 20; ++k) mass += pmf_tp({i, j, k}, t);
        }
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Sampler, DeterministicUnderFixedSeed) {
    const ThetaBP t(1.0, 1.0, 0.5);
    Stream a(77), b(77);
    const CountSample x = sample_bp(t, 100, a);
    const CountSample y = sample_bp(t, 100, b);
    EXPECT_TRUE(std::equal(x.flat().begin(), x.flat().end(), y.flat().begin(), y.flat().end()));
}

TEST(Sampler, BivariateMomentsAndZeroCell) {
    const ThetaBP t(1.0, 1.0, 0.5);
    Stream s(78);
    const std::size_t n = 1000000;
    const CountSample x = sample_bp(t, n, s);
    double m1 = 0, m2 = 0, c = 0, zeros = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += x(i, 0);
        m2 += x(i, 1);
        c += static_cast<double>(x(i, 0)) * x(i, 1);
        zeros += (x(i, 0) == 0 && x(i, 1) == 0) ? 1.0 : 0.0;
    }
    m1 /= n;
    m2 /= n;
    const double cov = c / n - m1 * m2;
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(m1, 1.0, 4.0 * std::sqrt(1.0 / dn));
    EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(1.0 / dn));
    // sd of the sample covariance is about sqrt((theta1 theta2 + theta3^2) / n); sqrt(4/n) is a loose cap.
    EXPECT_NEAR(cov, 0.5, 4.0 * std::sqrt(4.0 / dn));
    const double p0 = std::exp(-1.5);
    EXPECT_NEAR(zeros / dn, p0, 4.0 * std::sqrt(p0 * (1 - p0) / dn));
}

TEST(Sampler, ChiSquareAgainstPmf) {
    const ThetaBP t(1.2, 0.9, 0.4);
    Stream s(79);
    const std::size_t n = 1000000;
    const CountSample x = sample_bp(t, n, s);
    const int K = 9; // cells (i, j) with i, j < K, rest pooled
    std::vector<double> obs(K * K + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = x(i, 0), b = x(i, 1);
        obs[(a < K && b < K) ? static_cast<std::size_t>(a * K + b) : static_cast<std::size_t>(K * K)] += 1.0;
    }
    double chi = 0.0, inside = 0.0;
    int cells = 0;
    for (int a = 0; a < K; ++a) {
        for (int b = 0; b < K; ++b) {
            const double p = pmf_bp_convolution(a, b, t);
            inside += p;
            const double e = p * n;
            if (e < 5.0) continue;
            const double d = obs[static_cast<std::size_t>(a * K + b)] - e;
            chi += d * d / e;
            ++cells;
        }
    }
    const double e_tail = (1.0 - inside) * n;
    if (e_tail >= 5.0) {
        chi += (obs.back() - e_tail) * (obs.back() - e_tail) / e_tail;
        ++cells;
    }
    // Wilson-Hilferty 1e-4 upper quantile of chi-square with cells-1 df.
    const double df = cells - 1;
    const double z = 3.719;
    const double crit = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
    EXPECT_LT(chi, crit);
}

TEST(Sampler, TrivariateMomentsAndCovariance) {
    const ThetaTP t(1.0, 1.5, 2.0, 0.5);
    Stream s(80);
    const std::size_t n = 1000000;
    const CountSample x = sample_tp(t, n, s);
    double m[3] = {0, 0, 0}, c01 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) m[k] += x(i, k);
        c01 += static_cast<double>(x(i, 0)) * x(i, 1);
    }
    for (double& v : m) v /= n;
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(m[0], 1.0, 4.0 * std::sqrt(1.0 / dn));
    EXPECT_NEAR(m[1], 1.5, 4.0 * std::sqrt(1.5 / dn));
    EXPECT_NEAR(m[2], 2.0, 4.0 * std::sqrt(2.0 / dn));
    EXPECT_NEAR(c01 / dn - m[0] * m[1], 0.5, 4.0 * std::sqrt(4.0 / dn));
    Stream a(81), b(81);
    const CountSample p = sample_tp(t, 50, a);
    const CountSample q = sample_tp(t, 50, b);
    EXPECT_TRUE(std::equal(p.flat().begin(), p.flat().end(), q.flat().begin(), q.flat().end()));
}
