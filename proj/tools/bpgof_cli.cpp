// bpgof command-line driver: test, sample, simulate-size, simulate-power,
// bench, merge.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpgof/alts.hpp"
#include "bpgof/boot.hpp"
#include "bpgof/error.hpp"
#include "bpgof/harness.hpp"
#include "bpgof/io.hpp"
#include "bpgof/parallel.hpp"
#include "bpgof/statistic.hpp"

using namespace bpgof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string input;
    std::string out;
    std::string stat;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    int order = 0;
    int B = 500;
    int reps = 1000;
    std::string n = "50";
    std::string theta;
    std::string family;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string format = "json";
    std::string estimator = "mle";
    std::string convention = "plus-one";
    std::string divisor = "n";
    std::string shard = "0/1";
    std::string dump;
    std::vector<std::string> shard_files;
    bool timing = false;
    bool keep_replicates = false;
    bool ks_round = false;
    bool progress = false;
};

// Flags whose config value is a boolean rather than an argument.
const std::set<std::string> kBoolKeys{"timing", "keep-replicates", "ks-round", "progress"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment. Keys are long option names
// without the dashes; "boot" is also accepted as "B".
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("config: expected key = value", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "B") key = "boot";
        if (key.empty()) throw ParseError("config: empty key", lineno);
        kv.emplace_back(key, value);
    }
    return kv;
}

// Config entries override command-line flags: matching flags are dropped
// from argv and the config values appended.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;
    for (const auto& [key, value] : read_config(path)) {
        const std::string flag = "--" + key;
        for (std::size_t i = 0; i < args.size();) {
            if (args[i] == flag) {
                const bool takes_value = !kBoolKeys.count(key) && i + 1 < args.size();
                args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + (takes_value ? 2 : 1));
            } else if (args[i].rfind(flag + "=", 0) == 0) {
                args.erase(args.begin() + static_cast<long>(i));
            } else {
                ++i;
            }
        }
        if (kBoolKeys.count(key)) {
            if (value == "true" || value == "1" || value == "yes") args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::size_t> parse_ns(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& tok : split(s, ',')) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("--n: not an integer '" + tok + "'");
        }
        if (used != tok.size() || v < 2) throw ParseError("--n: sample sizes must be integers >= 2");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ParseError("--n: no sample size given");
    return out;
}

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "mle") return EstimatorKind::Mle;
    if (s == "moment") return EstimatorKind::Moment;
    throw ParseError("--estimator must be mle or moment");
}

AlternativeSpec family_from(const Options& o, bool required) {
    if (!o.family.empty() && !o.theta.empty()) throw ParseError("give either --theta or --family, not both");
    if (!o.family.empty()) return parse_alternative(o.family);
    if (!o.theta.empty()) {
        const auto parts = split(o.theta, ',');
        if (parts.size() == 3) return parse_alternative("BP(" + o.theta + ")");
        if (parts.size() == 4) return parse_alternative("TP(" + o.theta + ")");
        throw ParseError("--theta needs 3 (bivariate) or 4 (trivariate) values");
    }
    if (required) throw ParseError("--theta or --family is required");
    return parse_alternative("BP(1,1,0.25)");
}

std::vector<StatisticSpec> stats_from(const Options& o, int dim) {
    std::vector<StatId> ids;
    const std::string text = o.stat.empty() ? (dim == 3 ? "t3" : "tn") : o.stat;
    for (const auto& name : split(text, ',')) {
        if (name == "all") {
            for (StatId id : all_stat_ids()) {
                if (stat_dim(id) == dim) ids.push_back(id);
            }
        } else {
            ids.push_back(parse_stat_id(name));
        }
    }
    std::vector<StatisticSpec> specs;
    for (StatId id : ids) {
        if (stat_dim(id) != dim) {
            throw ParseError("statistic " + stat_name(id) + " is not defined for dimension " + std::to_string(dim));
        }
        std::vector<double> a{o.a1, o.a2};
        if (dim == 3) a.push_back(o.a3);
        StatisticSpec s = make_spec(id, a);
        s.order = o.order;
        s.divisor = o.divisor == "n-1" ? VarianceDivisor::NMinus1 : VarianceDivisor::N;
        specs.push_back(s);
    }
    if (specs.empty()) throw ParseError("no statistic selected");
    for (const auto& s : specs) {
        if (s.id == StatId::T3 || s.id == StatId::R3 || s.id == StatId::S3) {
            std::cerr << "warning: trivariate quadrature statistics are expensive (cubic grids per resample)\n";
            break;
        }
    }
    return specs;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw ParseError("cannot write '" + o.out + "'");
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

int cmd_test(const Options& o) {
    const CountSample sample = read_counts_csv(o.input);
    const auto specs = stats_from(o, sample.dim());
    BootstrapConfig bc;
    bc.B = o.B;
    bc.seed = o.seed;
    bc.estimator = parse_estimator(o.estimator);
    bc.workers = resolve_workers(o.workers);
    bc.keep_replicates = o.keep_replicates;
    bc.convention = o.convention == "plain" ? PValueConvention::Plain : PValueConvention::PlusOne;
    bc.mle.divisor = o.divisor == "n-1" ? VarianceDivisor::NMinus1 : VarianceDivisor::N;
    const auto reports = bootstrap_test_multi(sample, specs, bc);
    if (o.format == "csv") {
        std::ostringstream os;
        os << "statistic,a,value,p_boot,p_asym,df,theta_hat,estimator,B,seed,n\n";
        for (const auto& r : reports) {
            std::ostringstream th;
            for (std::size_t k = 0; k < r.theta_hat.theta.values().size(); ++k) {
                th << (k ? ";" : "") << std::setprecision(10) << r.theta_hat.theta.values()[k];
            }
            os << stat_name(r.spec.id) << ',' << '"' << r.spec.a.to_string() << '"' << ',' << std::setprecision(10)
               << r.observed.value << ',' << r.p_boot << ',';
            if (r.observed.p_asym) os << *r.observed.p_asym;
            os << ',';
            if (r.observed.df) os << *r.observed.df;
            os << ',' << th.str() << ',' << to_string(r.estimator) << ',' << r.B << ',' << r.seed << ',' << r.n << '\n';
        }
        emit(o, os.str());
    } else {
        emit(o, reports_to_json(reports, o.timing));
    }
    return kExitOk;
}

int cmd_sample(const Options& o) {
    const AlternativeSpec fam = family_from(o, true);
    const auto ns = parse_ns(o.n);
    if (ns.size() != 1) throw ParseError("sample: give a single --n");
    Stream rng = Stream(o.seed).derive("sample");
    const CountSample s = sample_alternative(fam, ns.front(), rng);
    std::ostringstream os;
    write_counts_csv(os, s);
    emit(o, os.str());
    return kExitOk;
}

std::pair<int, int> parse_shard(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw ParseError("--shard must look like i/K");
    try {
        const int i = std::stoi(s.substr(0, slash));
        const int k = std::stoi(s.substr(slash + 1));
        if (k < 1 || i < 0 || i >= k) throw ParseError("--shard: need 0 <= i < K");
        return {i, k};
    } catch (const std::invalid_argument&) {
        throw ParseError("--shard must look like i/K");
    }
}

void emit_simulation(const Options& o, const SimulationResult& res) {
    if (!o.dump.empty()) {
        std::ofstream f(o.dump);
        if (!f) throw ParseError("cannot write '" + o.dump + "'");
        f << simulation_to_json(res) << '\n';
    }
    emit(o, o.format == "csv" ? summaries_to_csv(res.summarize()) : summaries_to_json(res));
}

int cmd_simulate(const Options& o, bool power) {
    SimulationConfig cfg;
    cfg.family = family_from(o, power);
    if (!power && cfg.family.family != Family::BP && cfg.family.family != Family::TP) {
        throw ParseError("simulate-size needs a null family (--theta, BP(...) or TP(...))");
    }
    cfg.ns = parse_ns(o.n);
    cfg.stats = stats_from(o, cfg.family.dim());
    cfg.reps = o.reps;
    cfg.B = o.B;
    cfg.seed = o.seed;
    cfg.estimator = parse_estimator(o.estimator);
    cfg.workers = resolve_workers(o.workers);
    std::tie(cfg.shard_index, cfg.shard_count) = parse_shard(o.shard);
    cfg.ks_round2 = o.ks_round;
    if (o.progress) {
        cfg.progress = [](std::size_t done, std::size_t total) {
            if (done % 10 == 0 || done == total) std::cerr << "\r" << done << "/" << total << std::flush;
            if (done == total) std::cerr << '\n';
        };
    }
    emit_simulation(o, simulate(cfg));
    return kExitOk;
}

int cmd_bench(const Options& o) {
    BenchConfig cfg;
    cfg.family = family_from(o, false);
    cfg.ns = parse_ns(o.n);
    cfg.stats = stats_from(o, cfg.family.dim());
    cfg.reps = o.reps;
    cfg.B = o.B;
    cfg.seed = o.seed;
    cfg.estimator = parse_estimator(o.estimator);
    const auto rows = bench(cfg);
    emit(o, o.format == "csv" ? bench_to_csv(rows) : bench_to_json(rows));
    return kExitOk;
}

int cmd_merge(const Options& o) {
    if (o.shard_files.empty()) throw ParseError("merge: no shard files given");
    std::vector<SimulationResult> shards;
    for (const auto& path : o.shard_files) {
        std::ifstream f(path);
        if (!f) throw ParseError("cannot open '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        shards.push_back(simulation_from_json(ss.str()));
    }
    const SimulationResult merged = merge(shards);
    Options copy = o;
    emit_simulation(copy, merged);
    return kExitOk;
}

void add_common(CLI::App* c, Options& o) {
    c->add_option("--out", o.out, "Output path (default stdout)");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--seed", o.seed, "Master seed");
}

void add_stat_opts(CLI::App* c, Options& o) {
    c->add_option("--stat", o.stat,
                  "Comma list of statistics: tn, tn-quad, rn, sn, wn, crockett, ib, nib, t3, r3, s3, w3, or all");
    c->add_option("--a1", o.a1, "Weight exponent a1 (> -1)");
    c->add_option("--a2", o.a2, "Weight exponent a2 (> -1)");
    c->add_option("--a3", o.a3, "Weight exponent a3 (> -1)");
    c->add_option("--order", o.order, "Quadrature order per axis (0 = default policy)");
    c->add_option("--boot", o.B, "Bootstrap replicates B")->check(CLI::PositiveNumber);
    c->add_option("--estimator", o.estimator, "mle or moment")->check(CLI::IsMember({"mle", "moment"}));
    c->add_option("--divisor", o.divisor, "Variance divisor: n or n-1")->check(CLI::IsMember({"n", "n-1"}));
}

void add_model_opts(CLI::App* c, Options& o) {
    c->add_option("--theta", o.theta, "Null parameters, e.g. 1,1,0.25 or 1,1,1,0.25");
    c->add_option("--family", o.family, "Family spec, e.g. BB(2;0.61,0.01,0.01)");
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    Options o;
    CLI::App app{"Goodness-of-fit tests for the bivariate and trivariate Poisson distribution"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    // Handled before CLI11 sees the arguments; registered for --help.
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; its entries override command-line flags");

    auto* test = app.add_subcommand("test", "Bootstrap goodness-of-fit test on a CSV of counts");
    test->add_option("--input", o.input, "CSV with header x1,x2[,x3]")->required();
    add_common(test, o);
    add_stat_opts(test, o);
    test->add_option("--workers", o.workers, "Worker threads (default: BPGOF_WORKERS or hardware)");
    test->add_option("--convention", o.convention, "p-value convention: plus-one or plain")
        ->check(CLI::IsMember({"plus-one", "plain"}));
    test->add_flag("--timing", o.timing, "Include wall time in the JSON report");
    test->add_flag("--keep-replicates", o.keep_replicates, "Include bootstrap replicate values");

    auto* sample = app.add_subcommand("sample", "Draw a synthetic dataset as CSV");
    add_common(sample, o);
    add_model_opts(sample, o);
    sample->add_option("--n", o.n, "Sample size");

    auto* size = app.add_subcommand("simulate-size", "Monte Carlo size study (f05, f10, KS p-value)");
    auto* power = app.add_subcommand("simulate-power", "Monte Carlo power study against an alternative family");
    for (auto* c : {size, power}) {
        add_common(c, o);
        add_stat_opts(c, o);
        add_model_opts(c, o);
        c->add_option("--n", o.n, "Comma list of sample sizes");
        c->add_option("--reps", o.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
        c->add_option("--workers", o.workers, "Worker threads across replications");
        c->add_option("--shard", o.shard, "Run only replications r with r mod K == i, as i/K");
        c->add_option("--dump", o.dump, "Write per-replication p-values (input of merge)");
        c->add_flag("--ks-round", o.ks_round, "Round p-values to 2 decimals before the KS test");
        c->add_flag("--progress", o.progress, "Report progress on stderr");
    }

    auto* bench_cmd = app.add_subcommand("bench", "Mean wall time of a full bootstrap test per statistic");
    add_common(bench_cmd, o);
    add_stat_opts(bench_cmd, o);
    add_model_opts(bench_cmd, o);
    bench_cmd->add_option("--n", o.n, "Comma list of sample sizes");
    bench_cmd->add_option("--reps", o.reps, "Datasets timed per (n, statistic)")->check(CLI::PositiveNumber);

    auto* merge_cmd = app.add_subcommand("merge", "Combine shard dumps into one summary");
    merge_cmd->add_option("shards", o.shard_files, "Shard dump files")->required();
    merge_cmd->add_option("--out", o.out, "Output path (default stdout)");
    merge_cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    merge_cmd->add_option("--dump", o.dump, "Write the merged per-replication dump");

    try {
        args = apply_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    // bench times a handful of datasets unless --reps says otherwise.
    if (bench_cmd->parsed() && bench_cmd->count("--reps") == 0) o.reps = 3;

    try {
        if (test->parsed()) return cmd_test(o);
        if (sample->parsed()) return cmd_sample(o);
        if (size->parsed()) return cmd_simulate(o, false);
        if (power->parsed()) return cmd_simulate(o, true);
        if (bench_cmd->parsed()) return cmd_bench(o);
        if (merge_cmd->parsed()) return cmd_merge(o);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const UnstableStatisticError& e) {
        std::cerr << "numerical failure: " << e.what() << " (offending value " << e.offending() << ")\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateSampleError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
