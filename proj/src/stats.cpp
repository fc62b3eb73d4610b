#include "bpgof/stats.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

double ipow(double u, int e) {
    double r = 1.0;
    double b = u;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// u^x, or its derivative x u^{x-1} (zero at x = 0).
double power_term(double u, int x, bool differentiate) {
    if (!differentiate) return ipow(u, x);
    return x == 0 ? 0.0 : x * ipow(u, x - 1);
}

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

// Calls fn(index, u, weight) for every node in row-major order.
template <class Fn>
void for_each_node(const QuadratureGrid& grid, Fn&& fn) {
    const int d = grid.dim();
    std::array<double, 8> u{};
    if (d == 1) {
        const auto& r0 = grid.axis(0);
        for (std::size_t i = 0; i < r0.nodes.size(); ++i) {
            u[0] = r0.nodes[i];
            fn(i, u.data(), r0.weights[i]);
        }
        return;
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    const std::size_t total = grid.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            const auto& r = grid.axis(k);
            u[static_cast<std::size_t>(k)] = r.nodes[idx[static_cast<std::size_t>(k)]];
            w *= r.weights[idx[static_cast<std::size_t>(k)]];
        }
        fn(flat, u.data(), w);
        for (int k = d - 1; k >= 0; --k) {
            if (++idx[static_cast<std::size_t>(k)] < grid.axis(k).nodes.size()) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }
}

void check_grid(const WeightExponents& a, const QuadratureGrid& grid, int dim) {
    if (a.dim() != dim || grid.dim() != dim) throw DomainError("weight/grid dimension mismatch");
    for (int k = 0; k < dim; ++k) {
        if (grid.axis(k).a != a[k]) throw DomainError("quadrature grid built for a different weight");
    }
}

double sample_n(const CountSample& s) { return static_cast<double>(s.size()); }

} // namespace

WeightExponents::WeightExponents(std::vector<double> a) : a_(std::move(a)) {
    if (a_.empty()) throw DomainError("WeightExponents: empty");
    for (double v : a_) {
        if (!(v > -1.0) || !std::isfinite(v)) throw DomainError("weight exponent must be > -1");
    }
}

double WeightExponents::max() const { return *std::max_element(a_.begin(), a_.end()); }

std::string WeightExponents::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < a_.size(); ++k) {
        if (k) os << ',';
        os << a_[k];
    }
    os << ')';
    return os.str();
}

double chi_square_upper(double x, int df) {
    if (df < 1) throw DomainError("chi-square df must be >= 1");
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

void GeneratingFunction::tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const {
    out.resize(grid.size());
    const auto d = static_cast<std::size_t>(grid.dim());
    for_each_node(grid, [&](std::size_t i, const double* u, double) { out[i] = partial({u, d}, mask); });
}

EmpiricalPgf::EmpiricalPgf(const CountSample& sample) : support_(sample.support()) {}

double EmpiricalPgf::partial(std::span<const double> u, unsigned mask) const {
    const int d = support_.dim;
    if (static_cast<int>(u.size()) != d) throw DomainError("epgf: dimension mismatch");
    double s = 0.0;
    for (std::size_t p = 0; p < support_.distinct(); ++p) {
        const auto pt = support_.point(p);
        double t = static_cast<double>(support_.counts[p]);
        for (int k = 0; k < d && t != 0.0; ++k) {
            t *= power_term(u[static_cast<std::size_t>(k)], pt[static_cast<std::size_t>(k)], (mask >> k) & 1u);
        }
        s += t;
    }
    return s / static_cast<double>(support_.n);
}

void EmpiricalPgf::tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const {
    const int d = support_.dim;
    if (grid.dim() != d) throw DomainError("epgf: grid dimension mismatch");
    const auto D = static_cast<Eigen::Index>(support_.distinct());
    // Per-axis factor tables A_k(i, s).
    std::vector<Eigen::MatrixXd> A(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        const auto& r = grid.axis(k);
        const auto q = static_cast<Eigen::Index>(r.nodes.size());
        const int mk = support_.max_count[static_cast<std::size_t>(k)];
        Eigen::MatrixXd pw(q, mk + 1);
        for (Eigen::Index i = 0; i < q; ++i) {
            pw(i, 0) = 1.0;
            for (int e = 1; e <= mk; ++e) pw(i, e) = pw(i, e - 1) * r.nodes[static_cast<std::size_t>(i)];
        }
        const bool diff = (mask >> k) & 1u;
        auto& Ak = A[static_cast<std::size_t>(k)];
        Ak.resize(q, D);
        for (Eigen::Index s = 0; s < D; ++s) {
            const int x = support_.point(static_cast<std::size_t>(s))[static_cast<std::size_t>(k)];
            if (!diff) {
                Ak.col(s) = pw.col(x);
            } else if (x == 0) {
                Ak.col(s).setZero();
            } else {
                Ak.col(s) = static_cast<double>(x) * pw.col(x - 1);
            }
        }
    }
    Eigen::VectorXd w(D);
    for (Eigen::Index s = 0; s < D; ++s) {
        w(s) = static_cast<double>(support_.counts[static_cast<std::size_t>(s)]) / static_cast<double>(support_.n);
    }
    out.assign(grid.size(), 0.0);
    if (d == 2) {
        const Eigen::Index q0 = A[0].rows();
        const Eigen::Index q1 = A[1].rows();
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(out.data(), q0, q1);
        M.noalias() = (A[0] * w.asDiagonal()) * A[1].transpose();
        return;
    }
    if (d == 3) {
        const Eigen::Index q0 = A[0].rows();
        const Eigen::Index q1 = A[1].rows();
        const Eigen::Index q2 = A[2].rows();
        for (Eigen::Index s = 0; s < D; ++s) {
            for (Eigen::Index i = 0; i < q0; ++i) {
                const double t0 = w(s) * A[0](i, s);
                if (t0 == 0.0) continue;
                for (Eigen::Index j = 0; j < q1; ++j) {
                    const double t1 = t0 * A[1](j, s);
                    double* row = out.data() + (i * q1 + j) * q2;
                    for (Eigen::Index k = 0; k < q2; ++k) row[k] += t1 * A[2](k, s);
                }
            }
        }
        return;
    }
    GeneratingFunction::tabulate(grid, mask, out);
}

double ModelPgf::partial(std::span<const double> u, unsigned mask) const {
    return pgf_m_partial(u, theta_, mask);
}

void ModelPgf::tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const {
    if (mask != 0) {
        GeneratingFunction::tabulate(grid, mask, out);
        return;
    }
    const int m = theta_.dim();
    if (grid.dim() != m) throw DomainError("model pgf: grid dimension mismatch");
    out.resize(grid.size());
    for_each_node(grid, [&](std::size_t i, const double* u, double) {
        double prod = 1.0;
        double sum = 0.0;
        double e = 0.0;
        for (int k = 0; k < m; ++k) {
            prod *= u[k];
            sum += u[k];
            e += theta_.marginal(k) * (u[k] - 1.0);
        }
        e += theta_.common() * (prod - sum + static_cast<double>(m - 1));
        out[i] = std::exp(e);
    });
}

double epgf(const CountSample& sample, std::array<double, 2> u) {
    return EmpiricalPgf(sample).partial(u, 0u);
}
double epgf_d1(const CountSample& sample, std::array<double, 2> u) {
    return EmpiricalPgf(sample).partial(u, 1u);
}
double epgf_d2(const CountSample& sample, std::array<double, 2> u) {
    return EmpiricalPgf(sample).partial(u, 2u);
}
double epgf_d12(const CountSample& sample, std::array<double, 2> u) {
    return EmpiricalPgf(sample).partial(u, 3u);
}

double dependence_term(std::array<double, 2> u, const ThetaBP& theta) {
    return theta.theta3() + (theta.theta2() + theta.theta3() * (u[0] - 1.0)) * (theta.theta1() + theta.theta3() * (u[1] - 1.0));
}

std::array<double, 3> residuals_D(const GeneratingFunction& g, const ThetaBP& theta, std::array<double, 2> u) {
    if (g.dim() != 2) throw DomainError("residuals_D: bivariate pgf required");
    const std::array<double, 2> s1{u[0], 1.0};
    const std::array<double, 2> s2{1.0, u[1]};
    const double d1 = g.partial(s1, 1u) - theta.theta1() * g.partial(s1, 0u);
    const double d2 = g.partial(s2, 2u) - theta.theta2() * g.partial(s2, 0u);
    const double d3 = g.partial(u, 3u) - dependence_term(u, theta) * g.partial(u, 0u);
    return {d1, d2, d3};
}

std::array<double, 3> residuals_D(const CountSample& sample, const ThetaBP& theta, std::array<double, 2> u) {
    return residuals_D(EmpiricalPgf(sample), theta, u);
}

StatValue crockett_T(const CountSample& sample, VarianceDivisor divisor) {
    if (sample.dim() != 2) throw DomainError("crockett_T: bivariate sample required");
    const auto m = sample_moments(sample, divisor);
    const double x1 = m.mean[0], x2 = m.mean[1];
    if (x1 <= 0.0) throw UnstableStatisticError("crockett_T: zero mean of x1", x1);
    if (x2 <= 0.0) throw UnstableStatisticError("crockett_T: zero mean of x2", x2);
    const double z1 = m.var(0) - x1;
    const double z2 = m.var(1) - x2;
    const double c2 = m.covariance(0, 1) * m.covariance(0, 1);
    const double den = x1 * x1 * x2 * x2 - c2 * c2;
    if (!(den > 0.0)) throw UnstableStatisticError("crockett_T: non-positive denominator", den);
    const double num = x2 * x2 * z1 * z1 - 2.0 * c2 * z1 * z2 + x1 * x1 * z2 * z2;
    const double t = 0.5 * sample_n(sample) * num / den;
    return {"crockett", t, 2, chi_square_upper(t, 2)};
}

StatValue loukas_kemp_IB(const CountSample& sample, const std::optional<ThetaBP>& theta, VarianceDivisor divisor) {
    if (sample.dim() != 2) throw DomainError("loukas_kemp_IB: bivariate sample required");
    if (sample.size() < 2) throw DegenerateSampleError("I_B needs n >= 2");
    const double n = sample_n(sample);
    if (theta) {
        const double t1 = theta->theta1(), t2 = theta->theta2();
        const double rho = theta->theta3() / std::sqrt(t1 * t2);
        double s = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double w1 = (sample(i, 0) - t1) / std::sqrt(t1);
            const double w2 = (sample(i, 1) - t2) / std::sqrt(t2);
            s += w1 * w1 - 2.0 * rho * w1 * w2 + w2 * w2;
        }
        const double ib = s / (1.0 - rho * rho);
        const int df = static_cast<int>(2 * sample.size());
        return {"ib", ib, df, chi_square_upper(ib, df)};
    }
    const auto m = sample_moments(sample, divisor);
    const double x1 = m.mean[0], x2 = m.mean[1];
    const double c2 = m.covariance(0, 1) * m.covariance(0, 1);
    const double den = x1 * x2 - c2;
    if (!(den > 0.0)) throw UnstableStatisticError("loukas_kemp_IB: non-positive denominator", den);
    const double ib = n * (x2 * m.var(0) - 2.0 * c2 + x1 * m.var(1)) / den;
    const int df = static_cast<int>(2 * sample.size()) - 3;
    return {"ib", ib, df, chi_square_upper(ib, df)};
}

StatValue rayner_best_NIB(const CountSample& sample, VarianceDivisor divisor) {
    if (sample.dim() != 2) throw DomainError("rayner_best_NIB: bivariate sample required");
    if (sample.size() < 2) throw DegenerateSampleError("NI_B needs n >= 2");
    const auto m = sample_moments(sample, divisor);
    const double x1 = m.mean[0], x2 = m.mean[1];
    if (x1 <= 0.0) throw UnstableStatisticError("rayner_best_NIB: zero mean of x1", x1);
    if (x2 <= 0.0) throw UnstableStatisticError("rayner_best_NIB: zero mean of x2", x2);
    const double v1 = m.var(0), v2 = m.var(1);
    if (!(v1 > 0.0 && v2 > 0.0)) throw UnstableStatisticError("rayner_best_NIB: zero variance", std::min(v1, v2));
    const double c = m.covariance(0, 1);
    const double r2 = c * c / (v1 * v2);
    if (!(r2 < 1.0)) throw UnstableStatisticError("rayner_best_NIB: r^2 = 1", r2);
    const double nib = sample_n(sample) / (1.0 - r2) * (v1 / x1 - 2.0 * r2 * std::sqrt(v1 * v2 / (x1 * x2)) + v2 / x2);
    const int df = static_cast<int>(2 * sample.size()) - 3;
    return {"nib", nib, df, chi_square_upper(nib, df)};
}

int exact_quadrature_order(const Support& support) {
    int mx = 0;
    for (int v : support.max_count) mx = std::max(mx, v);
    return mx + 3;
}

double R_integral(const GeneratingFunction& gn, const ThetaMV& theta, const QuadratureGrid& grid) {
    std::vector<double> emp, model;
    gn.tabulate(grid, 0u, emp);
    ModelPgf(theta).tabulate(grid, 0u, model);
    CompensatedSum acc;
    for_each_node(grid, [&](std::size_t i, const double*, double w) {
        const double r = emp[i] - model[i];
        acc.add(w * r * r);
    });
    return acc.value();
}

double S_integral(const GeneratingFunction& gn, const ThetaMV& theta, const QuadratureGrid& grid) {
    const int m = theta.dim();
    if (gn.dim() != m || grid.dim() != m) throw DomainError("S_integral: dimension mismatch");
    std::vector<double> g0;
    gn.tabulate(grid, 0u, g0);
    std::vector<std::vector<double>> gi(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) gn.tabulate(grid, 1u << i, gi[static_cast<std::size_t>(i)]);
    CompensatedSum acc;
    for_each_node(grid, [&](std::size_t idx, const double* u, double w) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            double others = 1.0;
            for (int j = 0; j < m; ++j) {
                if (j != i) others *= u[j];
            }
            const double b = gi[static_cast<std::size_t>(i)][idx] - (theta.marginal(i) + theta.common() * (others - 1.0)) * g0[idx];
            s += b * b;
        }
        acc.add(w * s);
    });
    return acc.value();
}

double T_integral(const GeneratingFunction& gn, const ThetaBP& theta, const QuadratureGrid& grid) {
    if (gn.dim() != 2 || grid.dim() != 2) throw DomainError("T_integral: bivariate grid required");
    CompensatedSum acc;
    // D1 and D2 do not depend on the other coordinate; its weight integrates
    // to 1/(a+1) exactly.
    const auto& r0 = grid.axis(0);
    const auto& r1 = grid.axis(1);
    double line = 0.0;
    for (std::size_t i = 0; i < r0.nodes.size(); ++i) {
        const std::array<double, 2> u{r0.nodes[i], 1.0};
        const double d1 = gn.partial(u, 1u) - theta.theta1() * gn.partial(u, 0u);
        line += r0.weights[i] * d1 * d1;
    }
    acc.add(line / (r1.a + 1.0));
    line = 0.0;
    for (std::size_t j = 0; j < r1.nodes.size(); ++j) {
        const std::array<double, 2> u{1.0, r1.nodes[j]};
        const double d2 = gn.partial(u, 2u) - theta.theta2() * gn.partial(u, 0u);
        line += r1.weights[j] * d2 * d2;
    }
    acc.add(line / (r0.a + 1.0));
    std::vector<double> g0, g12;
    gn.tabulate(grid, 0u, g0);
    gn.tabulate(grid, 3u, g12);
    for_each_node(grid, [&](std::size_t idx, const double* u, double w) {
        const double d3 = g12[idx] - dependence_term({u[0], u[1]}, theta) * g0[idx];
        acc.add(w * d3 * d3);
    });
    return acc.value();
}

StatValue R_stat(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    check_grid(a, grid, 2);
    return {"rn", sample_n(sample) * R_integral(EmpiricalPgf(sample), theta.to_mv(), grid), std::nullopt, std::nullopt};
}

StatValue S_stat(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    check_grid(a, grid, 2);
    return {"sn", sample_n(sample) * S_integral(EmpiricalPgf(sample), theta.to_mv(), grid), std::nullopt, std::nullopt};
}

StatValue T_stat_quadrature(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a,
                            const QuadratureGrid& grid) {
    check_grid(a, grid, 2);
    return {"tn-quad", sample_n(sample) * T_integral(EmpiricalPgf(sample), theta, grid), std::nullopt, std::nullopt};
}

StatValue T_stat_closed(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a) {
    if (sample.dim() != 2 || a.dim() != 2) throw DomainError("T_stat_closed: bivariate sample and weight required");
    const Support& sup = sample.support();
    const double t1 = theta.theta1(), t2 = theta.theta2(), t3 = theta.theta3();
    const double r1 = theta.reduced1(), r2 = theta.reduced2();
    // f(u) = c0 + c1 u1 + c2 u2 + c3 u1 u2.
    const double c0 = t3 + r1 * r2;
    const double c1 = t3 * r1;
    const double c2 = t3 * r2;
    const double c3 = t3 * t3;
    const double a1 = a[0], a2 = a[1];

    // inv[k][o+1][s] = 1 / (s + a_k + o) for offsets o = -1..3.
    std::array<std::vector<std::array<double, 5>>, 2> inv;
    for (int k = 0; k < 2; ++k) {
        const int smax = 2 * sup.max_count[static_cast<std::size_t>(k)];
        auto& t = inv[static_cast<std::size_t>(k)];
        t.resize(static_cast<std::size_t>(smax) + 1);
        for (int s = 0; s <= smax; ++s) {
            for (int o = -1; o <= 3; ++o) {
                const double den = s + a[k] + o;
                t[static_cast<std::size_t>(s)][static_cast<std::size_t>(o + 1)] = den > 0.0 ? 1.0 / den : 0.0;
            }
        }
    }
    auto I1 = [&](int s, int o) { return inv[0][static_cast<std::size_t>(s)][static_cast<std::size_t>(o + 1)]; };
    auto I2 = [&](int s, int o) { return inv[1][static_cast<std::size_t>(s)][static_cast<std::size_t>(o + 1)]; };

    // Terms of the integrated squared model part, independent of the data.
    const double f00 = c0 * c0, f01 = 2.0 * c0 * c2, f10 = 2.0 * c0 * c1, f02 = c2 * c2, f20 = c1 * c1;
    const double f11 = 2.0 * (c0 * c3 + c1 * c2), f22 = c3 * c3, f12 = 2.0 * c2 * c3, f21 = 2.0 * c1 * c3;
    const double pref1 = 1.0 / (a2 + 1.0);
    const double pref2 = 1.0 / (a1 + 1.0);

    auto kernel = [&](std::span<const int> x, std::span<const int> y) {
        const int s1 = x[0] + y[0];
        const int s2 = x[1] + y[1];
        double k1 = t1 * t1 * I1(s1, 1);
        if (x[0] && y[0]) k1 += static_cast<double>(x[0]) * y[0] * I1(s1, -1);
        if (s1) k1 -= t1 * s1 * I1(s1, 0);
        double k2 = t2 * t2 * I2(s2, 1);
        if (x[1] && y[1]) k2 += static_cast<double>(x[1]) * y[1] * I2(s2, -1);
        if (s2) k2 -= t2 * s2 * I2(s2, 0);

        const double ax = static_cast<double>(x[0]) * x[1];
        const double ay = static_cast<double>(y[0]) * y[1];
        const double j1 = I1(s1, 1), j2 = I2(s2, 1);
        double k3 = f00 * j1 * j2 + f01 * j1 * I2(s2, 2) + f10 * I1(s1, 2) * j2 + f02 * j1 * I2(s2, 3) +
                    f20 * I1(s1, 3) * j2 + f11 * I1(s1, 2) * I2(s2, 2) + f22 * I1(s1, 3) * I2(s2, 3) +
                    f12 * I1(s1, 2) * I2(s2, 3) + f21 * I1(s1, 3) * I2(s2, 2);
        if (ax != 0.0 && ay != 0.0) k3 += ax * ay * I1(s1, -1) * I2(s2, -1);
        if (ax != 0.0 || ay != 0.0) {
            const double i10 = I1(s1, 0), i20 = I2(s2, 0);
            k3 -= (ax + ay) * (c0 * i10 * i20 + c2 * i10 * j2 + c1 * j1 * i20 + c3 * j1 * j2);
        }
        return pref1 * k1 + pref2 * k2 + k3;
    };

    CompensatedSum acc;
    const std::size_t D = sup.distinct();
    for (std::size_t s = 0; s < D; ++s) {
        const auto xs = sup.point(s);
        const double cs = static_cast<double>(sup.counts[s]);
        acc.add(cs * cs * kernel(xs, xs));
        for (std::size_t t = s + 1; t < D; ++t) {
            acc.add(2.0 * cs * static_cast<double>(sup.counts[t]) * kernel(xs, sup.point(t)));
        }
    }
    return {"tn", acc.value() / sample_n(sample), std::nullopt, std::nullopt};
}

double Wm_value(const Support& support, const ThetaMV& theta) {
    const int m = support.dim;
    if (theta.dim() != m) throw DomainError("W: dimension mismatch");
    int M = 0;
    for (int v : support.max_count) M = std::max(M, v);
    const int side = M + 1;
    std::size_t cells = 1;
    for (int k = 0; k < m; ++k) cells *= static_cast<std::size_t>(side);
    std::vector<double> p(cells, 0.0);
    auto flat = [&](const int* r) {
        std::size_t f = 0;
        for (int k = 0; k < m; ++k) f = f * static_cast<std::size_t>(side) + static_cast<std::size_t>(r[k]);
        return f;
    };
    for (std::size_t s = 0; s < support.distinct(); ++s) {
        p[flat(support.point(s).data())] = static_cast<double>(support.counts[s]) / static_cast<double>(support.n);
    }
    auto pn = [&](const int* r) {
        for (int k = 0; k < m; ++k) {
            if (r[k] < 0 || r[k] > M) return 0.0;
        }
        return p[flat(r)];
    };
    std::vector<int> r(static_cast<std::size_t>(m), 0);
    std::vector<int> q(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const double here = p[cell];
        for (int j = 0; j < m; ++j) {
            q = r;
            q[static_cast<std::size_t>(j)] += 1;
            const double up = pn(q.data());
            for (int k = 0; k < m; ++k) q[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(k)] - (k == j ? 0 : 1);
            const double down = pn(q.data());
            const double b = (r[static_cast<std::size_t>(j)] + 1) * up - theta.reduced(j) * here - theta.common() * down;
            total += b * b;
        }
        for (int k = m - 1; k >= 0; --k) {
            if (++r[static_cast<std::size_t>(k)] <= M) break;
            r[static_cast<std::size_t>(k)] = 0;
        }
    }
    return total;
}

StatValue W_stat(const CountSample& sample, const ThetaBP& theta) {
    if (sample.dim() != 2) throw DomainError("W_stat: bivariate sample required");
    return {"wn", Wm_value(sample.support(), theta.to_mv()), std::nullopt, std::nullopt};
}

} // namespace bpgof
