#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bpgof/alts.hpp"
#include "bpgof/boot.hpp"
#include "bpgof/error.hpp"
#include "bpgof/estimate.hpp"
#include "bpgof/io.hpp"
#include "bpgof/model.hpp"
#include "bpgof/statistic.hpp"

namespace py = pybind11;
using namespace bpgof;

namespace {

using IntArray = py::array_t<long long, py::array::c_style | py::array::forcecast>;

CountSample to_sample(const IntArray& x) {
    if (x.ndim() != 2) throw DomainError("counts must be a 2-d array of shape (n, m)");
    std::vector<int> flat(static_cast<std::size_t>(x.size()));
    const long long* p = x.data();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (p[i] < 0 || p[i] > std::numeric_limits<int>::max()) throw DomainError("counts must be non-negative ints");
        flat[i] = static_cast<int>(p[i]);
    }
    return CountSample(static_cast<int>(x.shape(1)), std::move(flat));
}

IntArray to_array(const CountSample& x) {
    IntArray out({static_cast<py::ssize_t>(x.size()), static_cast<py::ssize_t>(x.dim())});
    auto* p = out.mutable_data();
    const auto flat = x.flat();
    std::copy(flat.begin(), flat.end(), p);
    return out;
}

StatisticSpec spec_of(const std::string& name, const std::optional<std::vector<double>>& a) {
    const StatId id = parse_stat_id(name);
    return a ? make_spec(id, *a) : make_spec(id);
}

EstimatorKind estimator_of(const std::string& name) {
    if (name == "mle") return EstimatorKind::Mle;
    if (name == "moment") return EstimatorKind::Moment;
    throw ParseError("estimator must be 'mle' or 'moment', got '" + name + "'");
}

py::dict estimate_dict(const EstimateResult& e) {
    py::dict d;
    const auto v = e.theta.values();
    d["theta"] = std::vector<double>(v.begin(), v.end());
    d["method"] = to_string(e.method);
    d["loglik"] = e.loglik;
    d["converged"] = e.converged;
    d["boundary"] = e.boundary_flag;
    d["iterations"] = e.iterations;
    return d;
}

py::dict stat_dict(const StatValue& s) {
    py::dict d;
    d["name"] = s.name;
    d["value"] = s.value;
    d["df"] = s.df ? py::cast(*s.df) : py::none();
    d["p_asym"] = s.p_asym ? py::cast(*s.p_asym) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Goodness-of-fit tests for the bivariate and trivariate Poisson laws";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DegenerateSampleError>(m, "DegenerateSampleError", PyExc_ValueError);
    py::register_exception<UnstableStatisticError>(m, "UnstableStatisticError", PyExc_ArithmeticError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "sample_poisson",
        [](const std::vector<double>& theta, std::size_t n, std::uint64_t seed) {
            Stream s(seed);
            return to_array(sample_mv(ThetaMV(theta), n, s));
        },
        py::arg("theta"), py::arg("n"), py::arg("seed") = 0,
        "Draw n rows from the common-shock Poisson law; theta = (t1, ..., tm, common).");

    m.def(
        "sample_alternative",
        [](const std::string& family, std::size_t n, std::uint64_t seed) {
            Stream s(seed);
            return to_array(sample_alternative(parse_alternative(family), n, s));
        },
        py::arg("family"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "alternative_moments",
        [](const std::string& family) {
            const AlternativeSpec spec = parse_alternative(family);
            const FamilyMoments fm = theoretical_moments(spec);
            py::dict d;
            d["label"] = spec.label;
            d["params"] = spec.params;
            d["mean"] = fm.mean;
            d["var"] = fm.var;
            d["cov"] = fm.cov;
            d["rho"] = fm.correlation();
            d["dispersion"] = std::vector<double>{fm.dispersion(0), fm.dispersion(1)};
            return d;
        },
        py::arg("family"));

    m.def(
        "estimate",
        [](const IntArray& x, const std::string& method) { return estimate_dict(estimate(to_sample(x), estimator_of(method))); },
        py::arg("counts"), py::arg("method") = "mle");

    m.def(
        "statistic",
        [](const IntArray& x, const std::string& name, std::optional<std::vector<double>> a, const std::string& method) {
            const CountSample sample = to_sample(x);
            const StatisticSpec spec = spec_of(name, a);
            const EstimateResult est = is_moment_stat(spec.id) ? boundary_estimate(sample)
                                                               : estimate(sample, estimator_of(method));
            return stat_dict(compute_statistic(spec, sample, est));
        },
        py::arg("counts"), py::arg("name"), py::arg("a") = py::none(), py::arg("method") = "mle");

    m.def(
        "bootstrap_test_raw",
        [](const IntArray& x, const std::string& name, int B, std::uint64_t seed, std::optional<std::vector<double>> a,
           const std::string& method, int workers, bool keep_replicates) {
            const CountSample sample = to_sample(x);
            BootstrapConfig c;
            c.B = B;
            c.seed = seed;
            c.statistic = spec_of(name, a);
            c.estimator = estimator_of(method);
            c.workers = workers;
            c.keep_replicates = keep_replicates;
            TestReport r;
            {
                py::gil_scoped_release release;
                r = bootstrap_test(sample, c);
            }
            return py::make_tuple(report_to_json(r, true, -1), r.replicate_values);
        },
        py::arg("counts"), py::arg("name") = "tn", py::arg("B") = 500, py::arg("seed") = 0, py::arg("a") = py::none(),
        py::arg("method") = "mle", py::arg("workers") = 1, py::arg("keep_replicates") = false);

    m.def(
        "ks_uniformity",
        [](const std::vector<double>& p, bool round2) {
            const KsResult r = pvalue_uniformity_check(p, round2);
            return py::make_tuple(r.statistic, r.pvalue);
        },
        py::arg("pvalues"), py::arg("round2") = false);

    m.def("statistic_names", [] {
        std::vector<std::string> out;
        for (StatId id : all_stat_ids()) out.push_back(stat_name(id));
        return out;
    });
}
