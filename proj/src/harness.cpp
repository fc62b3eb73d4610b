#include "bpgof/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "bpgof/error.hpp"
#include "bpgof/parallel.hpp"

namespace bpgof {

namespace {

struct RepOutput {
    std::vector<double> p;
    std::vector<bool> failed;
};

RepOutput run_rep(const SimulationConfig& cfg, std::size_t n, std::size_t r,
                  const std::vector<std::size_t>& boot_idx, const std::vector<std::size_t>& moment_idx) {
    const Stream root(cfg.seed);
    Stream data_rng = root.derive("data", {n, r});
    const CountSample sample = sample_alternative(cfg.family, n, data_rng);

    RepOutput out;
    out.p.assign(cfg.stats.size(), 1.0);
    out.failed.assign(cfg.stats.size(), false);

    if (!boot_idx.empty()) {
        std::vector<StatisticSpec> specs;
        for (auto k : boot_idx) specs.push_back(cfg.stats[k]);
        BootstrapConfig bc;
        bc.B = cfg.B;
        bc.seed = root.derive("rep", {n, r})();
        bc.estimator = cfg.estimator;
        bc.workers = 1;
        try {
            const auto reports = bootstrap_test_multi(sample, specs, bc);
            for (std::size_t j = 0; j < boot_idx.size(); ++j) out.p[boot_idx[j]] = reports[j].p_boot;
        } catch (const std::exception&) {
            for (auto k : boot_idx) out.failed[k] = true;
        }
    }
    if (!moment_idx.empty()) {
        const EstimateResult unused = boundary_estimate(sample);
        for (auto k : moment_idx) {
            try {
                const StatValue v = compute_statistic(cfg.stats[k], sample, unused);
                out.p[k] = v.p_asym.value_or(1.0);
            } catch (const std::exception&) {
                out.failed[k] = true;
            }
        }
    }
    return out;
}

} // namespace

std::vector<CellSummary> SimulationResult::summarize() const {
    std::vector<CellSummary> out;
    for (const auto& c : cells) {
        CellSummary s;
        s.n = c.n;
        s.stat = c.stat;
        s.reps = static_cast<int>(c.pvalues.size());
        s.failures = c.failures;
        if (s.reps > 0) {
            const double m = static_cast<double>(s.reps);
            auto frac = [&](double alpha) {
                return static_cast<double>(std::count_if(c.pvalues.begin(), c.pvalues.end(),
                                                         [alpha](double p) { return p <= alpha; })) /
                       m;
            };
            s.f01 = frac(0.01);
            s.f05 = frac(0.05);
            s.f10 = frac(0.10);
        }
        if (s.reps >= 2) {
            const KsResult ks = pvalue_uniformity_check(c.pvalues, ks_round2);
            s.ks_stat = ks.statistic;
            s.ks_pvalue = ks.pvalue;
        }
        out.push_back(std::move(s));
    }
    return out;
}

SimulationResult simulate(const SimulationConfig& cfg) {
    if (cfg.reps < 1) throw DomainError("reps must be >= 1");
    if (cfg.B < 1) throw DomainError("B must be >= 1");
    if (cfg.stats.empty()) throw DomainError("no statistic selected");
    if (cfg.ns.empty()) throw DomainError("no sample size selected");
    if (cfg.shard_count < 1 || cfg.shard_index < 0 || cfg.shard_index >= cfg.shard_count) {
        throw DomainError("invalid shard index/count");
    }
    validate(cfg.family);
    std::vector<std::size_t> boot_idx, moment_idx;
    for (std::size_t k = 0; k < cfg.stats.size(); ++k) {
        if (stat_dim(cfg.stats[k].id) != cfg.family.dim()) {
            throw DomainError("statistic " + cfg.stats[k].label() + " does not match family " + cfg.family.label);
        }
        (is_moment_stat(cfg.stats[k].id) ? moment_idx : boot_idx).push_back(k);
    }

    std::vector<std::size_t> mine;
    for (int r = cfg.shard_index; r < cfg.reps; r += cfg.shard_count) mine.push_back(static_cast<std::size_t>(r));

    struct Task {
        std::size_t n;
        std::size_t r;
    };
    std::vector<Task> tasks;
    for (auto n : cfg.ns) {
        for (auto r : mine) tasks.push_back({n, r});
    }
    std::vector<RepOutput> outputs(tasks.size());
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(tasks.size(), resolve_workers(cfg.workers), [&](std::size_t t) {
        outputs[t] = run_rep(cfg, tasks[t].n, tasks[t].r, boot_idx, moment_idx);
        const std::size_t d = ++done;
        if (cfg.progress) {
            std::lock_guard lock(progress_mutex);
            cfg.progress(d, tasks.size());
        }
    });

    SimulationResult res;
    res.family = cfg.family.label;
    res.B = cfg.B;
    res.seed = cfg.seed;
    res.reps = cfg.reps;
    res.ks_round2 = cfg.ks_round2;
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        for (std::size_t k = 0; k < cfg.stats.size(); ++k) {
            CellResult cell;
            cell.n = cfg.ns[ni];
            cell.stat = cfg.stats[k].label();
            for (std::size_t j = 0; j < mine.size(); ++j) {
                const auto& o = outputs[ni * mine.size() + j];
                cell.rep_index.push_back(static_cast<int>(mine[j]));
                cell.pvalues.push_back(o.p[k]);
                cell.failures += o.failed[k] ? 1 : 0;
            }
            res.cells.push_back(std::move(cell));
        }
    }
    return res;
}

SimulationResult merge(const std::vector<SimulationResult>& shards) {
    if (shards.empty()) throw DomainError("merge: no shards");
    SimulationResult out;
    const auto& first = shards.front();
    out.family = first.family;
    out.B = first.B;
    out.seed = first.seed;
    out.reps = first.reps;
    out.ks_round2 = first.ks_round2;

    std::map<std::pair<std::size_t, std::string>, std::map<int, double>> pv;
    std::map<std::pair<std::size_t, std::string>, int> failures;
    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& s : shards) {
        if (s.family != out.family || s.B != out.B || s.seed != out.seed || s.reps != out.reps) {
            throw DomainError("merge: shards come from different runs");
        }
        for (const auto& c : s.cells) {
            const auto key = std::make_pair(c.n, c.stat);
            if (!pv.count(key)) order.push_back(key);
            auto& m = pv[key];
            for (std::size_t j = 0; j < c.rep_index.size(); ++j) {
                if (!m.emplace(c.rep_index[j], c.pvalues[j]).second) {
                    throw DomainError("merge: replication " + std::to_string(c.rep_index[j]) + " reported twice");
                }
            }
            failures[key] += c.failures;
        }
    }
    for (const auto& key : order) {
        CellResult c;
        c.n = key.first;
        c.stat = key.second;
        c.failures = failures[key];
        for (const auto& [r, p] : pv[key]) {
            c.rep_index.push_back(r);
            c.pvalues.push_back(p);
        }
        out.cells.push_back(std::move(c));
    }
    return out;
}

std::vector<BenchRow> bench(const BenchConfig& cfg) {
    if (cfg.reps < 1) throw DomainError("bench: reps must be >= 1");
    validate(cfg.family);
    const Stream root(cfg.seed);
    std::vector<BenchRow> rows;
    for (auto n : cfg.ns) {
        std::vector<CountSample> data;
        for (int r = 0; r < cfg.reps; ++r) {
            Stream rng = root.derive("bench", {n, static_cast<std::uint64_t>(r)});
            data.push_back(sample_alternative(cfg.family, n, rng));
        }
        // Round-robin over statistics within each dataset so slow drift in
        // machine speed does not favour whichever statistic runs first.
        std::vector<double> total(cfg.stats.size(), 0.0);
        for (int r = 0; r < cfg.reps; ++r) {
            BootstrapConfig bc;
            bc.B = cfg.B;
            bc.seed = root.derive("bench-boot", {n, static_cast<std::uint64_t>(r)})();
            bc.estimator = cfg.estimator;
            bc.workers = 1;
            for (std::size_t k = 0; k < cfg.stats.size(); ++k) {
                bc.statistic = cfg.stats[k];
                const auto t0 = std::chrono::steady_clock::now();
                (void)bootstrap_test(data[static_cast<std::size_t>(r)], bc);
                total[k] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        }
        for (std::size_t k = 0; k < cfg.stats.size(); ++k) {
            BenchRow row;
            row.n = n;
            row.stat = cfg.stats[k].label();
            row.reps = cfg.reps;
            row.mean_seconds = total[k] / cfg.reps;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace bpgof
