#include "bpgof/mvariate.hpp"

#include <vector>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

void check_grid3(const WeightExponents& a, const QuadratureGrid& grid, int dim) {
    if (a.dim() != dim || grid.dim() != dim) throw DomainError("weight/grid dimension mismatch");
    for (int k = 0; k < dim; ++k) {
        if (grid.axis(k).a != a[k]) throw DomainError("quadrature grid built for a different weight");
    }
}

struct Brackets {
    double d4, d5, d6, h;
};

Brackets brackets(const double* u, const ThetaTP& th) {
    const double t4 = th.theta(4);
    const double e1 = th.theta(1) + t4 * (u[1] * u[2] - 1.0);
    const double e2 = th.theta(2) + t4 * (u[0] * u[2] - 1.0);
    const double e3 = th.theta(3) + t4 * (u[0] * u[1] - 1.0);
    return {e1 * e2 + t4 * u[2], e1 * e3 + t4 * u[1], e2 * e3 + t4 * u[0],
            e1 * e2 * e3 + t4 * (1.0 + u[0] * e1 + u[1] * e2 + u[2] * e3)};
}

} // namespace

double third_order_term(std::array<double, 3> u, const ThetaTP& theta) {
    return brackets(u.data(), theta).h;
}

TrivariateResiduals residuals_D3(const GeneratingFunction& g, const ThetaTP& theta, std::array<double, 3> u) {
    if (g.dim() != 3) throw DomainError("residuals_D3: trivariate pgf required");
    TrivariateResiduals r{};
    for (int k = 0; k < 3; ++k) {
        std::array<double, 3> s{1.0, 1.0, 1.0};
        s[static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(k)];
        r[static_cast<std::size_t>(k)] = g.partial(s, 1u << k) - theta.theta(k + 1) * g.partial(s, 0u);
    }
    const Brackets b = brackets(u.data(), theta);
    const double g0 = g.partial(u, 0u);
    r[3] = g.partial(u, 3u) - g0 * b.d4;
    r[4] = g.partial(u, 5u) - g0 * b.d5;
    r[5] = g.partial(u, 6u) - g0 * b.d6;
    r[6] = g.partial(u, 7u) - g0 * b.h;
    return r;
}

TrivariateResiduals residuals_D3(const CountSample& sample, const ThetaTP& theta, std::array<double, 3> u) {
    return residuals_D3(EmpiricalPgf(sample), theta, u);
}

double T3_integral(const GeneratingFunction& gn, const ThetaTP& theta, const QuadratureGrid& grid) {
    if (gn.dim() != 3 || grid.dim() != 3) throw DomainError("T3_integral: trivariate grid required");
    double total = 0.0;
    // Slice residuals: the two idle axes integrate to 1/(a+1) each.
    for (int k = 0; k < 3; ++k) {
        const auto& rk = grid.axis(k);
        double other = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j != k) other /= grid.axis(j).a + 1.0;
        }
        double line = 0.0;
        for (std::size_t i = 0; i < rk.nodes.size(); ++i) {
            std::array<double, 3> s{1.0, 1.0, 1.0};
            s[static_cast<std::size_t>(k)] = rk.nodes[i];
            const double d = gn.partial(s, 1u << k) - theta.theta(k + 1) * gn.partial(s, 0u);
            line += rk.weights[i] * d * d;
        }
        total += line * other;
    }
    std::vector<double> g0, g12, g13, g23, g123;
    gn.tabulate(grid, 0u, g0);
    gn.tabulate(grid, 3u, g12);
    gn.tabulate(grid, 5u, g13);
    gn.tabulate(grid, 6u, g23);
    gn.tabulate(grid, 7u, g123);
    const auto& r0 = grid.axis(0);
    const auto& r1 = grid.axis(1);
    const auto& r2 = grid.axis(2);
    std::size_t idx = 0;
    double cube = 0.0;
    for (std::size_t i = 0; i < r0.nodes.size(); ++i) {
        for (std::size_t j = 0; j < r1.nodes.size(); ++j) {
            double plane = 0.0;
            for (std::size_t k = 0; k < r2.nodes.size(); ++k, ++idx) {
                const double u[3] = {r0.nodes[i], r1.nodes[j], r2.nodes[k]};
                const Brackets b = brackets(u, theta);
                const double d4 = g12[idx] - g0[idx] * b.d4;
                const double d5 = g13[idx] - g0[idx] * b.d5;
                const double d6 = g23[idx] - g0[idx] * b.d6;
                const double d7 = g123[idx] - g0[idx] * b.h;
                plane += r2.weights[k] * (d4 * d4 + d5 * d5 + d6 * d6 + d7 * d7);
            }
            cube += r0.weights[i] * r1.weights[j] * plane;
        }
    }
    return total + cube;
}

StatValue T3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    check_grid3(a, grid, 3);
    const double n = static_cast<double>(sample.size());
    return {"t3", n * T3_integral(EmpiricalPgf(sample), theta, grid), std::nullopt, std::nullopt};
}

StatValue R3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    if (sample.dim() != 3) throw DomainError("R3_stat: trivariate sample required");
    auto v = Rm_stat(sample, theta.to_mv(), a, grid);
    v.name = "r3";
    return v;
}

StatValue S3_stat(const CountSample& sample, const ThetaTP& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    if (sample.dim() != 3) throw DomainError("S3_stat: trivariate sample required");
    auto v = Sm_stat(sample, theta.to_mv(), a, grid);
    v.name = "s3";
    return v;
}

StatValue W3_stat(const CountSample& sample, const ThetaTP& theta) {
    if (sample.dim() != 3) throw DomainError("W3_stat: trivariate sample required");
    return {"w3", Wm_value(sample.support(), theta.to_mv()), std::nullopt, std::nullopt};
}

StatValue Rm_stat(const CountSample& sample, const ThetaMV& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    check_grid3(a, grid, sample.dim());
    const double n = static_cast<double>(sample.size());
    return {"rm", n * R_integral(EmpiricalPgf(sample), theta, grid), std::nullopt, std::nullopt};
}

StatValue Sm_stat(const CountSample& sample, const ThetaMV& theta, const WeightExponents& a, const QuadratureGrid& grid) {
    check_grid3(a, grid, sample.dim());
    const double n = static_cast<double>(sample.size());
    return {"sm", n * S_integral(EmpiricalPgf(sample), theta, grid), std::nullopt, std::nullopt};
}

StatValue Wm_stat(const CountSample& sample, const ThetaMV& theta) {
    return {"wm", Wm_value(sample.support(), theta), std::nullopt, std::nullopt};
}

} // namespace bpgof
