#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bpgof/estimate.hpp"
#include "bpgof/statistic.hpp"

namespace bpgof {

/// PlusOne: p = (1 + #{T* >= T_obs}) / (B + 1). Plain: p = #{T* >= T_obs} / B.
enum class PValueConvention { PlusOne, Plain };

struct BootstrapConfig {
    int B = 500;
    std::uint64_t seed = 0;
    StatisticSpec statistic;
    EstimatorKind estimator = EstimatorKind::Mle;
    MleOptions mle;
    int workers = 1;
    bool keep_replicates = false;
    PValueConvention convention = PValueConvention::PlusOne;
    std::vector<double> alphas{0.01, 0.05, 0.10};
};

struct TestReport {
    StatValue observed;
    StatisticSpec spec;
    double p_boot = 1.0; // per the configured convention
    double p_star = 1.0; // plain exceedance fraction
    EstimateResult theta_hat{ThetaMV({1.0, 1.0, 0.5})};
    EstimatorKind estimator = EstimatorKind::Mle;
    int B = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::vector<double> replicate_values; // empty unless keep_replicates
    std::map<double, bool> decision_at;
    std::chrono::duration<double> wall_time{0.0};
    int retries = 0;      // resamples redrawn after an estimator or statistic failure
    int fallbacks = 0;    // resamples that ended on the boundary estimate
    int failed_replicates = 0; // statistic still failing; counted as exceedances
    std::vector<std::string> flags;

    /// Same content, ignoring wall_time.
    bool same_result(const TestReport& other) const;
};

/// Estimate used when the estimator throws: theta_k = max(mean_k, 3 eps),
/// common term eps. Never throws for a valid sample.
EstimateResult boundary_estimate(const CountSample& sample);

/// Parametric bootstrap test. Replicate b draws from the stream
/// Stream(seed).derive("boot", {b}) (retry r uses {b, r}), so the report does
/// not depend on the worker count.
TestReport bootstrap_test(const CountSample& sample, const BootstrapConfig& config);

/// Several statistics sharing the estimate, the resamples and the resample
/// estimates. config.statistic is ignored. The report for statistic k is
/// identical to bootstrap_test with that statistic and the same seed.
std::vector<TestReport> bootstrap_test_multi(const CountSample& sample, std::span<const StatisticSpec> stats,
                                             const BootstrapConfig& config);

struct KsResult {
    double statistic = 0.0;
    double pvalue = 1.0;
};

/// Tail of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS test against U(0,1) with the asymptotic p-value at
/// sqrt(n) D. round2 rounds each value to 2 decimals first.
/// Throws DomainError for fewer than 2 values or values outside [0,1].
KsResult pvalue_uniformity_check(std::span<const double> pvalues, bool round2 = false);

} // namespace bpgof
