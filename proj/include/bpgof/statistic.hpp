#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpgof/estimate.hpp"
#include "bpgof/stats.hpp"

namespace bpgof {

enum class StatId { Tn, TnQuad, Rn, Sn, Wn, Crockett, IB, NIB, T3, R3, S3, W3 };

/// CLI/report names: tn, tn-quad, rn, sn, wn, crockett, ib, nib, t3, r3, s3, w3.
std::string stat_name(StatId id);
/// Throws ParseError for an unknown name.
StatId parse_stat_id(std::string_view name);
std::vector<StatId> all_stat_ids();

int stat_dim(StatId id);
/// Moment tests carry asymptotic chi-square p-values.
bool is_moment_stat(StatId id);
bool uses_weight(StatId id);
bool uses_quadrature(StatId id);

struct StatisticSpec {
    StatId id = StatId::Tn;
    WeightExponents a{0.0, 0.0};
    /// Quadrature order per axis; 0 picks the default: the exact order for
    /// polynomial integrands (S, T, T3), 32 (2-D) or 24 (3-D) for R.
    int order = 0;
    VarianceDivisor divisor = VarianceDivisor::N;

    std::string label() const; // e.g. "tn(0,0)", "wn"
};

/// Spec with zero weights of the statistic's dimension.
StatisticSpec make_spec(StatId id);
StatisticSpec make_spec(StatId id, std::vector<double> a);

/// Quadrature order used for this statistic on this sample.
int resolved_order(const StatisticSpec& spec, const Support& support);

/// Evaluate the statistic with the given estimate (ignored by the moment tests).
StatValue compute_statistic(const StatisticSpec& spec, const CountSample& sample, const EstimateResult& est);

} // namespace bpgof
