#include "bpgof/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

// Recurrence coefficients of the Jacobi polynomials for weight
// (1-t)^alpha (1+t)^beta on [-1,1], orthonormal form.
void jacobi_coefficients(int n, double alpha, double beta, std::vector<double>& diag, std::vector<double>& off) {
    diag.assign(static_cast<std::size_t>(n), 0.0);
    off.assign(static_cast<std::size_t>(n), 0.0); // off[k] couples k-1 and k; off[0] unused
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        if (k == 0) {
            diag[0] = (beta - alpha) / (ab + 2.0);
        } else {
            diag[static_cast<std::size_t>(k)] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
            const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            const double den = s * s * (s + 1.0) * (s - 1.0);
            off[static_cast<std::size_t>(k)] = std::sqrt(num / den);
        }
    }
}

} // namespace

Rule1D gauss_jacobi_unit(int order, double a) {
    if (order < 1) throw DomainError("quadrature order must be >= 1");
    if (!(a > -1.0) || !std::isfinite(a)) throw DomainError("weight exponent must be > -1");

    const double alpha = 0.0;
    const double beta = a;
    std::vector<double> diag, off;
    jacobi_coefficients(order, alpha, beta, diag, off);
    const double log_mu0 = (alpha + beta + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                           std::lgamma(alpha + beta + 2.0);

    Eigen::VectorXd d(order);
    Eigen::VectorXd e(order > 1 ? order - 1 : 0);
    for (int k = 0; k < order; ++k) d(k) = diag[static_cast<std::size_t>(k)];
    for (int k = 1; k < order; ++k) e(k - 1) = off[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigen solve failed");

    Rule1D rule;
    rule.order = order;
    rule.a = a;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));

    // Orthonormal recurrence: off[k+1] p_{k+1} = (t - diag[k]) p_k - off[k] p_{k-1}.
    auto evaluate = [&](double t, double& pn, double& dpn, double& sumsq) {
        double p_prev = 0.0;
        double p = 1.0; // p_0 scaled to 1; the common factor cancels below
        double dp_prev = 0.0;
        double dp = 0.0;
        sumsq = 1.0;
        for (int k = 0; k < order; ++k) {
            const double b_next = (k + 1 < order) ? off[static_cast<std::size_t>(k + 1)] : 1.0;
            const double b_k = off[static_cast<std::size_t>(k)];
            const double p_next = ((t - diag[static_cast<std::size_t>(k)]) * p - b_k * p_prev) / b_next;
            const double dp_next = (p + (t - diag[static_cast<std::size_t>(k)]) * dp - b_k * dp_prev) / b_next;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
            if (k + 1 < order) sumsq += p * p;
        }
        pn = p;
        dpn = dp;
    };

    for (int i = 0; i < order; ++i) {
        double t = solver.eigenvalues()(i);
        double pn = 0.0, dpn = 0.0, sumsq = 0.0;
        for (int iter = 0; iter < 3; ++iter) {
            evaluate(t, pn, dpn, sumsq);
            if (dpn == 0.0) break;
            const double step = pn / dpn;
            t -= step;
            if (std::fabs(step) < 1e-16) break;
        }
        evaluate(t, pn, dpn, sumsq);
        // Christoffel weight mu0 / sum_k p_k(t)^2, then mapped to [0,1] with
        // the u^a weight: factor 2^{-a-1}.
        const double w = std::exp(log_mu0 - (a + 1.0) * std::log(2.0)) / sumsq;
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (t + 1.0);
        rule.weights[static_cast<std::size_t>(i)] = w;
    }
    return rule;
}

const Rule1D& cached_rule(int order, double a) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::unique_ptr<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{order, a}];
    if (!slot) slot = std::make_unique<Rule1D>(gauss_jacobi_unit(order, a));
    return *slot;
}

QuadratureGrid::QuadratureGrid(int order, std::span<const double> a) : order_(order) {
    if (a.empty()) throw DomainError("QuadratureGrid: need at least one axis");
    for (double ak : a) axes_.push_back(&cached_rule(order, ak));
}

std::size_t QuadratureGrid::size() const {
    std::size_t s = 1;
    for (const auto* r : axes_) s *= r->nodes.size();
    return s;
}

} // namespace bpgof
