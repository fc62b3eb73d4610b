#include "bpgof/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "bpgof/error.hpp"

namespace bpgof {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// JSON numbers must be finite; NaN and inf map to null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json theta_json(const EstimateResult& e) {
    json t = json::array();
    for (double v : e.theta.values()) t.push_back(v);
    return t;
}

json report_json(const TestReport& r, bool timing) {
    json j;
    j["statistic"] = stat_name(r.spec.id);
    j["a"] = json::array();
    for (double a : r.spec.a.values()) j["a"].push_back(a);
    j["value"] = num(r.observed.value);
    j["p_boot"] = r.p_boot;
    j["p_star"] = r.p_star;
    if (r.observed.p_asym) j["p_asym"] = *r.observed.p_asym;
    if (r.observed.df) j["df"] = *r.observed.df;
    j["theta_hat"] = theta_json(r.theta_hat);
    j["estimator"] = to_string(r.estimator);
    j["B"] = r.B;
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["flags"] = r.flags;
    json dec = json::object();
    for (const auto& [alpha, reject] : r.decision_at) {
        std::ostringstream k;
        k << alpha;
        dec[k.str()] = reject;
    }
    j["decisions"] = dec;
    j["retries"] = r.retries;
    j["fallbacks"] = r.fallbacks;
    j["failed_replicates"] = r.failed_replicates;
    if (!r.replicate_values.empty()) {
        json reps = json::array();
        for (double v : r.replicate_values) reps.push_back(num(v));
        j["replicate_values"] = reps;
    }
    if (timing) j["wall_time_s"] = r.wall_time.count();
    return j;
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

} // namespace

CountSample read_counts_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    int dim = 0;
    std::vector<int> flat;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (dim == 0) {
            const int d = static_cast<int>(cells.size());
            if (d != 2 && d != 3) throw ParseError("unsupported dimension " + std::to_string(d) + " in header", lineno);
            for (int k = 0; k < d; ++k) {
                if (cells[static_cast<std::size_t>(k)] != "x" + std::to_string(k + 1)) {
                    throw ParseError("header must be x1,x2[,x3]", lineno);
                }
            }
            dim = d;
            continue;
        }
        if (static_cast<int>(cells.size()) != dim) {
            throw ParseError("expected " + std::to_string(dim) + " fields, found " + std::to_string(cells.size()), lineno);
        }
        for (const auto& c : cells) {
            std::size_t used = 0;
            long v = -1;
            try {
                v = std::stol(c, &used);
            } catch (const std::exception&) {
                throw ParseError("not an integer: '" + c + "'", lineno);
            }
            if (used != c.size()) throw ParseError("not an integer: '" + c + "'", lineno);
            if (v < 0) throw ParseError("negative count", lineno);
            if (v > 1000000) throw ParseError("count too large", lineno);
            flat.push_back(static_cast<int>(v));
        }
    }
    if (dim == 0) throw ParseError("empty input: no header");
    if (flat.empty()) throw ParseError("no observations");
    return CountSample(dim, std::move(flat));
}

CountSample read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_counts_csv(in);
}

void write_counts_csv(std::ostream& out, const CountSample& sample) {
    for (int k = 0; k < sample.dim(); ++k) out << (k ? ",x" : "x") << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (int k = 0; k < sample.dim(); ++k) out << (k ? "," : "") << sample(i, k);
        out << '\n';
    }
}

std::string report_to_json(const TestReport& report, bool include_timing, int indent) {
    return report_json(report, include_timing).dump(indent);
}

std::string reports_to_json(const std::vector<TestReport>& reports, bool include_timing) {
    if (reports.size() == 1) return report_to_json(reports.front(), include_timing);
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_json(r, include_timing));
    return arr.dump(2);
}

std::string simulation_to_json(const SimulationResult& r) {
    json j;
    j["family"] = r.family;
    j["B"] = r.B;
    j["seed"] = r.seed;
    j["reps"] = r.reps;
    j["ks_round2"] = r.ks_round2;
    j["cells"] = json::array();
    for (const auto& c : r.cells) {
        json cj;
        cj["n"] = c.n;
        cj["stat"] = c.stat;
        cj["rep_index"] = c.rep_index;
        cj["pvalues"] = c.pvalues;
        cj["failures"] = c.failures;
        j["cells"].push_back(cj);
    }
    return j.dump();
}

SimulationResult simulation_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        SimulationResult r;
        r.family = j.at("family").get<std::string>();
        r.B = j.at("B").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.reps = j.at("reps").get<int>();
        r.ks_round2 = j.value("ks_round2", false);
        for (const auto& cj : j.at("cells")) {
            CellResult c;
            c.n = cj.at("n").get<std::size_t>();
            c.stat = cj.at("stat").get<std::string>();
            c.rep_index = cj.at("rep_index").get<std::vector<int>>();
            c.pvalues = cj.at("pvalues").get<std::vector<double>>();
            c.failures = cj.value("failures", 0);
            if (c.rep_index.size() != c.pvalues.size()) throw ParseError("shard cell with ragged arrays");
            r.cells.push_back(std::move(c));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("shard file: ") + e.what());
    }
}

std::string summaries_to_csv(const std::vector<CellSummary>& rows) {
    std::ostringstream os;
    os << "n,statistic,reps,f01,f05,f10,ks_stat,ks_pvalue,failures\n";
    for (const auto& s : rows) {
        os << s.n << ',' << s.stat << ',' << s.reps << ',' << fmt(s.f01) << ',' << fmt(s.f05) << ',' << fmt(s.f10)
           << ',' << fmt(s.ks_stat) << ',' << fmt(s.ks_pvalue) << ',' << s.failures << '\n';
    }
    return os.str();
}

std::string summaries_to_json(const SimulationResult& r) {
    json j;
    j["family"] = r.family;
    j["B"] = r.B;
    j["seed"] = r.seed;
    j["reps"] = r.reps;
    j["rows"] = json::array();
    for (const auto& s : r.summarize()) {
        j["rows"].push_back({{"n", s.n},
                             {"statistic", s.stat},
                             {"reps", s.reps},
                             {"f01", s.f01},
                             {"f05", s.f05},
                             {"f10", s.f10},
                             {"ks_stat", s.ks_stat},
                             {"ks_pvalue", s.ks_pvalue},
                             {"failures", s.failures}});
    }
    return j.dump(2);
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "n,statistic,reps,mean_seconds\n";
    for (const auto& r : rows) os << r.n << ',' << r.stat << ',' << r.reps << ',' << fmt(r.mean_seconds, 8) << '\n';
    return os.str();
}

std::string bench_to_json(const std::vector<BenchRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"n", r.n}, {"statistic", r.stat}, {"reps", r.reps}, {"mean_seconds", r.mean_seconds}});
    }
    return arr.dump(2);
}

} // namespace bpgof
