#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bpgof/boot.hpp"
#include "bpgof/harness.hpp"
#include "bpgof/model.hpp"

namespace bpgof {

/// CSV with header x1,x2[,x3] and one row of nonnegative integers per
/// observation. Throws ParseError carrying the 1-based line number.
CountSample read_counts_csv(std::istream& in);
CountSample read_counts_csv(const std::string& path);
void write_counts_csv(std::ostream& out, const CountSample& sample);

/// Stable keys: statistic, a, value, p_boot, p_asym (moment tests), df
/// (moment tests), theta_hat, estimator, B, seed, n, flags; plus p_star,
/// decisions, retries, fallbacks and, when requested, wall_time_s.
std::string report_to_json(const TestReport& report, bool include_timing = false, int indent = 2);
std::string reports_to_json(const std::vector<TestReport>& reports, bool include_timing = false);

/// Full per-replication dump; the input of the merge command.
std::string simulation_to_json(const SimulationResult& result);
SimulationResult simulation_from_json(const std::string& text);

std::string summaries_to_csv(const std::vector<CellSummary>& rows);
std::string summaries_to_json(const SimulationResult& result);

std::string bench_to_csv(const std::vector<BenchRow>& rows);
std::string bench_to_json(const std::vector<BenchRow>& rows);

} // namespace bpgof
