#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bpgof {

/// One-dimensional rule on [0,1] for the weight u^a (a > -1).
/// Exact for polynomials of degree <= 2*order - 1 against that weight.
struct Rule1D {
    int order = 0;
    double a = 0.0;
    std::vector<double> nodes;   // ascending, in (0,1)
    std::vector<double> weights; // sum to 1/(a+1)
};

/// Gauss-Jacobi rule on [0,1] with weight u^a, built by Golub-Welsch and
/// polished by Newton on the orthonormal recurrence. a == 0 gives
/// Gauss-Legendre. Throws DomainError for order < 1 or a <= -1.
Rule1D gauss_jacobi_unit(int order, double a);
inline Rule1D gauss_legendre_unit(int order) { return gauss_jacobi_unit(order, 0.0); }

/// Process-wide cache of rules; the returned reference stays valid.
const Rule1D& cached_rule(int order, double a);

/// Tensor-product grid on [0,1]^d; axis k carries the weight u_k^{a_k}, so
/// sum_i W_i f(u_i) approximates the integral of f(u) prod u_k^{a_k}.
class QuadratureGrid {
public:
    QuadratureGrid(int order, std::span<const double> a);

    int dim() const { return static_cast<int>(axes_.size()); }
    int order() const { return order_; }
    const Rule1D& axis(int k) const { return *axes_[static_cast<std::size_t>(k)]; }
    std::size_t size() const;

private:
    int order_;
    std::vector<const Rule1D*> axes_;
};

} // namespace bpgof
