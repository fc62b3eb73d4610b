#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bpgof/estimate.hpp"
#include "bpgof/model.hpp"
#include "bpgof/quadrature.hpp"

namespace bpgof {

/// Exponents of the weight w(u) = prod u_k^{a_k}; each a_k > -1.
class WeightExponents {
public:
    WeightExponents(std::initializer_list<double> a) : WeightExponents(std::vector<double>(a)) {}
    explicit WeightExponents(std::vector<double> a);

    int dim() const { return static_cast<int>(a_.size()); }
    double operator[](int k) const { return a_[static_cast<std::size_t>(k)]; }
    std::span<const double> values() const { return a_; }
    double max() const;
    /// "(0,0)", "(1,0,0.5)" ...
    std::string to_string() const;

private:
    std::vector<double> a_;
};

struct StatValue {
    std::string name;
    double value = 0.0;
    std::optional<int> df;
    std::optional<double> p_asym;
};

/// Upper tail of the chi-square law; negative x gives 1.
double chi_square_upper(double x, int df);

/// A (possibly empirical) pgf with mixed partials. Statistics are written
/// against this interface so the model pgf can be injected in place of the
/// epgf.
class GeneratingFunction {
public:
    virtual ~GeneratingFunction() = default;
    virtual int dim() const = 0;
    /// Mixed partial over the axes set in mask (each differentiated once).
    virtual double partial(std::span<const double> u, unsigned mask) const = 0;
    /// partial() at every grid node, row-major with axis 0 slowest.
    virtual void tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const;
};

/// g_n(u) = n^{-1} sum_i prod_k u_k^{X_ik}, with 0^0 = 1 and x u^{x-1} = 0 at x = 0.
class EmpiricalPgf final : public GeneratingFunction {
public:
    explicit EmpiricalPgf(const CountSample& sample);

    int dim() const override { return support_.dim; }
    double partial(std::span<const double> u, unsigned mask) const override;
    void tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const override;

private:
    Support support_;
};

class ModelPgf final : public GeneratingFunction {
public:
    explicit ModelPgf(ThetaMV theta) : theta_(std::move(theta)) {}

    int dim() const override { return theta_.dim(); }
    double partial(std::span<const double> u, unsigned mask) const override;
    void tabulate(const QuadratureGrid& grid, unsigned mask, std::vector<double>& out) const override;

private:
    ThetaMV theta_;
};

double epgf(const CountSample& sample, std::array<double, 2> u);
double epgf_d1(const CountSample& sample, std::array<double, 2> u);
double epgf_d2(const CountSample& sample, std::array<double, 2> u);
double epgf_d12(const CountSample& sample, std::array<double, 2> u);

/// f(u; theta) = theta3 + {theta2 + theta3(u1-1)}{theta1 + theta3(u2-1)}.
double dependence_term(std::array<double, 2> u, const ThetaBP& theta);

/// (D1, D2, D3): D1 on the slice (u1,1), D2 on (1,u2), D3 at (u1,u2).
std::array<double, 3> residuals_D(const GeneratingFunction& g, const ThetaBP& theta, std::array<double, 2> u);
std::array<double, 3> residuals_D(const CountSample& sample, const ThetaBP& theta, std::array<double, 2> u);

// Moment tests with asymptotic chi-square p-values. Throw
// UnstableStatisticError when the statistic's denominator degenerates.
StatValue crockett_T(const CountSample& sample, VarianceDivisor divisor = VarianceDivisor::N);
/// Estimated form (df = 2n-3) without theta; known-theta form (df = 2n) with it.
StatValue loukas_kemp_IB(const CountSample& sample, const std::optional<ThetaBP>& theta = std::nullopt,
                         VarianceDivisor divisor = VarianceDivisor::N);
StatValue rayner_best_NIB(const CountSample& sample, VarianceDivisor divisor = VarianceDivisor::N);

inline constexpr int kDefaultOrder2D = 32;
inline constexpr int kDefaultOrder3D = 24;

/// Smallest order at which the polynomial integrands (S, T, T3 and their
/// m-variate forms) are integrated exactly: max count + 3.
int exact_quadrature_order(const Support& support);

// Integrals behind the epgf statistics; the statistics are n times these.
/// int (g_n - g(.;theta))^2 w.
double R_integral(const GeneratingFunction& gn, const ThetaMV& theta, const QuadratureGrid& grid);
/// int sum_i B_i^2 w with B_i = d_i g_n - {theta_i + theta_c(prod_{j!=i} u_j - 1)} g_n.
double S_integral(const GeneratingFunction& gn, const ThetaMV& theta, const QuadratureGrid& grid);
/// int (D1^2 + D2^2 + D3^2) w.
double T_integral(const GeneratingFunction& gn, const ThetaBP& theta, const QuadratureGrid& grid);

StatValue R_stat(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue S_stat(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue T_stat_quadrature(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a,
                            const QuadratureGrid& grid);
/// Double-sum closed form over distinct rows; O(distinct^2).
StatValue T_stat_closed(const CountSample& sample, const ThetaBP& theta, const WeightExponents& a);

/// W_{m,n}: sum over the cube [0,M]^m of sum_j b_j^2, unscaled.
double Wm_value(const Support& support, const ThetaMV& theta);
StatValue W_stat(const CountSample& sample, const ThetaBP& theta);

} // namespace bpgof
