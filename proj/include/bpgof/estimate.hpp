#pragma once

#include <cstddef>
#include <vector>

#include "bpgof/model.hpp"

namespace bpgof {

/// Lower clamp for the common-shock mean and the gap theta_k - theta_common.
inline constexpr double kClampEpsilon = 1e-8;

/// Divisor for sample variances and covariances. Divisor n is the default
/// everywhere; n-1 is available for comparison runs.
enum class VarianceDivisor { N, NMinus1 };

struct SampleMoments {
    std::size_t n = 0;
    int dim = 0;
    std::vector<double> mean;
    std::vector<double> cov; // dim x dim, row-major; diagonal holds the variances

    double var(int k) const { return cov[static_cast<std::size_t>(k * dim + k)]; }
    double covariance(int j, int k) const { return cov[static_cast<std::size_t>(j * dim + k)]; }
};

SampleMoments sample_moments(const CountSample& sample, VarianceDivisor divisor = VarianceDivisor::N);

enum class EstimatorKind { Moment, Mle };

const char* to_string(EstimatorKind kind);

struct EstimateResult {
    ThetaMV theta;
    EstimatorKind method = EstimatorKind::Moment;
    double loglik = 0.0;
    bool converged = true;
    bool boundary_flag = false;
    int iterations = 0;

    ThetaBP theta_bp() const;
    ThetaTP theta_tp() const;
};

/// theta_k = mean_k; common term = covariance (bivariate) or the mean of the
/// pairwise covariances (trivariate), clamped to [eps, min mean - eps].
/// Throws DegenerateSampleError when n < 2 or a marginal mean is zero.
EstimateResult moment_estimate(const CountSample& sample, VarianceDivisor divisor = VarianceDivisor::N);

/// Sum of log pmf over the rows. Throws NumericalError naming the first row
/// whose pmf is not a positive finite number.
double log_likelihood(const CountSample& sample, const ThetaBP& theta);
double log_likelihood(const CountSample& sample, const ThetaTP& theta);
double log_likelihood(const CountSample& sample, const ThetaMV& theta);

struct MleOptions {
    double tolerance = 1e-10; // on |delta loglik|
    int max_iterations = 200;
    VarianceDivisor divisor = VarianceDivisor::N; // for the initializer
};

/// Maximum likelihood for the bivariate law. Profiles the likelihood over
/// the common term (golden section on [eps, min mean - eps], inner damped
/// Newton on the marginal means), then polishes with a projected Newton step
/// on all three coordinates. The returned loglik is never below that of the
/// moment estimate.
EstimateResult mle(const CountSample& sample, const MleOptions& options = {});

/// Trivariate analogue of mle().
EstimateResult mle_tp(const CountSample& sample, const MleOptions& options = {});

/// Dispatch on the estimator kind and the sample dimension.
EstimateResult estimate(const CountSample& sample, EstimatorKind kind, const MleOptions& options = {});

} // namespace bpgof
