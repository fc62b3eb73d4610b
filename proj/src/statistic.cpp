#include "bpgof/statistic.hpp"

#include <array>

#include "bpgof/error.hpp"
#include "bpgof/mvariate.hpp"

namespace bpgof {

namespace {

struct Entry {
    StatId id;
    const char* name;
    int dim;
};

constexpr std::array<Entry, 12> kTable{{
    {StatId::Tn, "tn", 2},
    {StatId::TnQuad, "tn-quad", 2},
    {StatId::Rn, "rn", 2},
    {StatId::Sn, "sn", 2},
    {StatId::Wn, "wn", 2},
    {StatId::Crockett, "crockett", 2},
    {StatId::IB, "ib", 2},
    {StatId::NIB, "nib", 2},
    {StatId::T3, "t3", 3},
    {StatId::R3, "r3", 3},
    {StatId::S3, "s3", 3},
    {StatId::W3, "w3", 3},
}};

const Entry& entry(StatId id) {
    for (const auto& e : kTable) {
        if (e.id == id) return e;
    }
    throw DomainError("unknown statistic");
}

} // namespace

std::string stat_name(StatId id) { return entry(id).name; }

StatId parse_stat_id(std::string_view name) {
    for (const auto& e : kTable) {
        if (name == e.name) return e.id;
    }
    throw ParseError("unknown statistic '" + std::string(name) + "'");
}

std::vector<StatId> all_stat_ids() {
    std::vector<StatId> out;
    for (const auto& e : kTable) out.push_back(e.id);
    return out;
}

int stat_dim(StatId id) { return entry(id).dim; }

bool is_moment_stat(StatId id) {
    return id == StatId::Crockett || id == StatId::IB || id == StatId::NIB;
}

bool uses_weight(StatId id) {
    return id == StatId::Tn || uses_quadrature(id);
}

bool uses_quadrature(StatId id) {
    switch (id) {
    case StatId::TnQuad:
    case StatId::Rn:
    case StatId::Sn:
    case StatId::T3:
    case StatId::R3:
    case StatId::S3:
        return true;
    default:
        return false;
    }
}

std::string StatisticSpec::label() const {
    return uses_weight(id) ? stat_name(id) + a.to_string() : stat_name(id);
}

StatisticSpec make_spec(StatId id) {
    return make_spec(id, std::vector<double>(static_cast<std::size_t>(stat_dim(id)), 0.0));
}

StatisticSpec make_spec(StatId id, std::vector<double> a) {
    if (static_cast<int>(a.size()) != stat_dim(id)) throw DomainError("weight dimension does not match statistic " + stat_name(id));
    StatisticSpec s;
    s.id = id;
    s.a = WeightExponents(std::move(a));
    return s;
}

int resolved_order(const StatisticSpec& spec, const Support& support) {
    if (spec.order > 0) return spec.order;
    if (spec.id == StatId::Rn) return kDefaultOrder2D;
    if (spec.id == StatId::R3) return kDefaultOrder3D;
    return exact_quadrature_order(support);
}

StatValue compute_statistic(const StatisticSpec& spec, const CountSample& sample, const EstimateResult& est) {
    if (sample.dim() != stat_dim(spec.id)) {
        throw DomainError("statistic " + stat_name(spec.id) + " needs a " + std::to_string(stat_dim(spec.id)) +
                          "-dimensional sample");
    }
    std::optional<QuadratureGrid> grid;
    if (uses_quadrature(spec.id)) grid.emplace(resolved_order(spec, sample.support()), spec.a.values());
    switch (spec.id) {
    case StatId::Tn:
        return T_stat_closed(sample, est.theta_bp(), spec.a);
    case StatId::TnQuad:
        return T_stat_quadrature(sample, est.theta_bp(), spec.a, *grid);
    case StatId::Rn:
        return R_stat(sample, est.theta_bp(), spec.a, *grid);
    case StatId::Sn:
        return S_stat(sample, est.theta_bp(), spec.a, *grid);
    case StatId::Wn:
        return W_stat(sample, est.theta_bp());
    case StatId::Crockett:
        return crockett_T(sample, spec.divisor);
    case StatId::IB:
        return loukas_kemp_IB(sample, std::nullopt, spec.divisor);
    case StatId::NIB:
        return rayner_best_NIB(sample, spec.divisor);
    case StatId::T3:
        return T3_stat(sample, est.theta_tp(), spec.a, *grid);
    case StatId::R3:
        return R3_stat(sample, est.theta_tp(), spec.a, *grid);
    case StatId::S3:
        return S3_stat(sample, est.theta_tp(), spec.a, *grid);
    case StatId::W3:
        return W3_stat(sample, est.theta_tp());
    }
    throw DomainError("unknown statistic");
}

} // namespace bpgof
