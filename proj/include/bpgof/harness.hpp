#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bpgof/alts.hpp"
#include "bpgof/boot.hpp"
#include "bpgof/statistic.hpp"

namespace bpgof {

/// Monte Carlo size/power run. Size runs use a null family (BP or TP); power
/// runs any alternative. Epgf statistics get bootstrap p-values, moment
/// statistics their asymptotic chi-square p-values.
struct SimulationConfig {
    AlternativeSpec family;
    std::vector<std::size_t> ns{50};
    std::vector<StatisticSpec> stats;
    int reps = 1000;
    int B = 500;
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::Mle;
    int workers = 1; // across replications; each replication runs sequentially
    int shard_index = 0;
    int shard_count = 1; // replication r belongs to shard r mod shard_count
    bool ks_round2 = false;
    /// Called after every finished replication with (done, total).
    std::function<void(std::size_t, std::size_t)> progress;
};

/// p-values of one (n, statistic) cell, indexed by replication.
struct CellResult {
    std::size_t n = 0;
    std::string stat; // StatisticSpec::label()
    std::vector<int> rep_index;
    std::vector<double> pvalues;
    int failures = 0; // replications whose test failed; counted as p = 1
};

struct CellSummary {
    std::size_t n = 0;
    std::string stat;
    int reps = 0;
    double f01 = 0.0;
    double f05 = 0.0;
    double f10 = 0.0;
    double ks_stat = 0.0;
    double ks_pvalue = 1.0; // 1 when fewer than 2 replications
    int failures = 0;
};

struct SimulationResult {
    std::string family;
    int B = 0;
    std::uint64_t seed = 0;
    int reps = 0; // total requested, across shards
    bool ks_round2 = false;
    std::vector<CellResult> cells;

    std::vector<CellSummary> summarize() const;
};

/// Data for replication r at size n come from Stream(seed).derive("data", {n, r});
/// its bootstrap seed is Stream(seed).derive("rep", {n, r})().
SimulationResult simulate(const SimulationConfig& config);

/// Combines shard results of the same run. Throws DomainError on a
/// mismatched run or a replication reported twice.
SimulationResult merge(const std::vector<SimulationResult>& shards);

struct BenchConfig {
    std::vector<std::size_t> ns{30, 50, 70};
    std::vector<StatisticSpec> stats;
    AlternativeSpec family;
    int reps = 3; // datasets per (n, statistic)
    int B = 500;
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::Mle;
};

struct BenchRow {
    std::size_t n = 0;
    std::string stat;
    int reps = 0;
    double mean_seconds = 0.0; // full bootstrap test, single worker
};

/// Times each statistic's full bootstrap test separately on the same datasets.
std::vector<BenchRow> bench(const BenchConfig& config);

} // namespace bpgof
