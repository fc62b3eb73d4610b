#pragma once

#include <array>

#include "bpgof/stats.hpp"

namespace bpgof {

/// D1..D7 of the trivariate characterization at u. D1-D3 live on the
/// marginal slices (u_k with the other coordinates at 1); D4-D7 use the
/// full point u.
using TrivariateResiduals = std::array<double, 7>;

/// h(u; theta) = prod_i e_i + theta4 (1 + sum_k u_k e_k), e_i = theta_i + theta4(prod_{j!=i} u_j - 1).
double third_order_term(std::array<double, 3> u, const ThetaTP& theta);

TrivariateResiduals residuals_D3(const GeneratingFunction& g, const ThetaTP& theta, std::array<double, 3> u);
TrivariateResiduals residuals_D3(const CountSample& sample, const ThetaTP& theta, std::array<double, 3> u);

/// int sum_{k=1}^7 D_k^2 w over [0,1]^3.
double T3_integral(const GeneratingFunction& gn, const ThetaTP& theta, const QuadratureGrid& grid);

StatValue T3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue R3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue S3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue W3_stat(const CountSample& sample, const ThetaTP& theta);

// Generic m-variate forms; m is the sample dimension. At m = 2 they run the
// same code as the bivariate statistics.
StatValue Rm_stat(const CountSample& sample, const ThetaMV& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue Sm_stat(const CountSample& sample, const ThetaMV& theta, const WeightExponents& a, const QuadratureGrid& grid);
StatValue Wm_stat(const CountSample& sample, const ThetaMV& theta);

} // namespace bpgof
