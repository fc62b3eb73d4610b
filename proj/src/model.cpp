#include "bpgof/model.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

void check_unit(std::span<const double> u) {
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("pgf argument outside [0,1]: " + std::to_string(v));
    }
}

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) return -INFINITY;
    const double mx = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    return mx + std::log(s);
}

// log(theta^k) with 0^0 = 1.
double log_power(double theta, int k) {
    if (k == 0) return 0.0;
    return k * std::log(theta);
}

// Sum over set partitions of `mask` of the product of derivatives of the
// exponent E over each block.
double partition_sum(unsigned mask, const std::vector<double>& single, double common,
                     std::span<const double> u) {
    if (mask == 0) return 1.0;
    const int m = static_cast<int>(u.size());
    const int first = std::countr_zero(mask);
    const unsigned rest = mask & ~(1u << first);
    double total = 0.0;
    // Enumerate blocks containing `first`: first plus any subset of rest.
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
        const unsigned block = sub | (1u << first);
        double dblock;
        if (std::popcount(block) == 1) {
            dblock = single[static_cast<std::size_t>(first)];
        } else {
            dblock = common;
            for (int j = 0; j < m; ++j) {
                if (!(block & (1u << j))) dblock *= u[static_cast<std::size_t>(j)];
            }
        }
        total += dblock * partition_sum(rest & ~sub, single, common, u);
        if (sub == 0) break;
    }
    return total;
}

} // namespace

ThetaMV::ThetaMV(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 3) throw DomainError("ThetaMV: need at least 2 marginal means and a common term");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("ThetaMV: non-finite parameter");
    }
    if (!(common() > 0.0)) throw DomainError("Poisson parameter: common term must be > 0");
    for (int k = 0; k < dim(); ++k) {
        if (!(marginal(k) > common())) {
            throw DomainError("Poisson parameter: theta_" + std::to_string(k + 1) +
                              " must exceed the common term");
        }
    }
}

ThetaBP::ThetaBP(double theta1, double theta2, double theta3) : t_{theta1, theta2, theta3} {
    if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(theta3) || !(theta3 > 0.0) ||
        !(theta1 > theta3) || !(theta2 > theta3)) {
        throw DomainError("ThetaBP outside {theta1 > theta3, theta2 > theta3, theta3 > 0}");
    }
}

ThetaTP::ThetaTP(double theta1, double theta2, double theta3, double theta4)
    : t_{theta1, theta2, theta3, theta4} {
    for (double v : t_) {
        if (!std::isfinite(v)) throw DomainError("ThetaTP: non-finite parameter");
    }
    if (!(theta4 > 0.0) || !(theta1 > theta4) || !(theta2 > theta4) || !(theta3 > theta4)) {
        throw DomainError("ThetaTP outside {theta_k > theta4 > 0}");
    }
}

CountSample::CountSample(int dim, std::vector<int> flat) : dim_(dim), data_(std::move(flat)) {
    if (dim != 2 && dim != 3) throw DomainError("unsupported dimension " + std::to_string(dim));
    if (data_.empty()) throw DomainError("CountSample: empty sample");
    if (data_.size() % static_cast<std::size_t>(dim) != 0) throw DomainError("CountSample: ragged rows");
    for (int v : data_) {
        if (v < 0) throw DomainError("CountSample: negative count");
    }

    const std::size_t n = size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const auto d = static_cast<std::size_t>(dim_);
    auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(data_.begin() + a * d, data_.begin() + (a + 1) * d,
                                            data_.begin() + b * d, data_.begin() + (b + 1) * d);
    };
    std::sort(order.begin(), order.end(), less);

    support_.dim = dim_;
    support_.n = n;
    support_.max_count.assign(d, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::size_t i = order[idx];
        const bool same = idx > 0 && std::equal(data_.begin() + i * d, data_.begin() + (i + 1) * d,
                                                data_.begin() + order[idx - 1] * d);
        if (same) {
            ++support_.counts.back();
        } else {
            support_.points.insert(support_.points.end(), data_.begin() + i * d, data_.begin() + (i + 1) * d);
            support_.counts.push_back(1);
        }
        for (std::size_t k = 0; k < d; ++k) support_.max_count[k] = std::max(support_.max_count[k], data_[i * d + k]);
    }
}

CountSample CountSample::from_pairs(std::span<const std::array<int, 2>> rows) {
    std::vector<int> flat;
    flat.reserve(rows.size() * 2);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return CountSample(2, std::move(flat));
}

CountSample CountSample::from_triples(std::span<const std::array<int, 3>> rows) {
    std::vector<int> flat;
    flat.reserve(rows.size() * 3);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return CountSample(3, std::move(flat));
}

CountSample CountSample::concat(const CountSample& other) const {
    if (other.dim_ != dim_) throw DomainError("concat: dimension mismatch");
    std::vector<int> flat = data_;
    flat.insert(flat.end(), other.data_.begin(), other.data_.end());
    return CountSample(dim_, std::move(flat));
}

CountSample CountSample::project(std::span<const int> axes) const {
    std::vector<int> flat;
    flat.reserve(size() * axes.size());
    for (std::size_t i = 0; i < size(); ++i) {
        for (int k : axes) {
            if (k < 0 || k >= dim_) throw DomainError("project: axis out of range");
            flat.push_back((*this)(i, k));
        }
    }
    return CountSample(static_cast<int>(axes.size()), std::move(flat));
}

double poisson_pmf(int k, double mean) {
    if (k < 0) return 0.0;
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(log_power(mean, k) - mean - log_factorial(k));
}

double pgf_bp(std::array<double, 2> u, const ThetaBP& theta) {
    check_unit(u);
    return std::exp(theta.theta1() * (u[0] - 1.0) + theta.theta2() * (u[1] - 1.0) +
                    theta.theta3() * (u[0] - 1.0) * (u[1] - 1.0));
}

double pgf_tp(std::array<double, 3> u, const ThetaTP& theta) {
    check_unit(u);
    return std::exp(theta.theta(1) * (u[0] - 1.0) + theta.theta(2) * (u[1] - 1.0) + theta.theta(3) * (u[2] - 1.0) +
                    theta.theta(4) * (u[0] * u[1] * u[2] - u[0] - u[1] - u[2] + 2.0));
}

double pgf_m(std::span<const double> u, const ThetaMV& theta) {
    return pgf_m_partial(u, theta, 0u);
}

double pgf_m_partial(std::span<const double> u, const ThetaMV& theta, unsigned mask) {
    const int m = theta.dim();
    if (static_cast<int>(u.size()) != m) throw DomainError("pgf_m: dimension mismatch");
    check_unit(u);
    double prod = 1.0;
    double sum = 0.0;
    double exponent = 0.0;
    for (int i = 0; i < m; ++i) {
        prod *= u[static_cast<std::size_t>(i)];
        sum += u[static_cast<std::size_t>(i)];
        exponent += theta.marginal(i) * (u[static_cast<std::size_t>(i)] - 1.0);
    }
    exponent += theta.common() * (prod - sum + static_cast<double>(m - 1));
    const double g = std::exp(exponent);
    if (mask == 0) return g;
    std::vector<double> single(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double others = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j != i) others *= u[static_cast<std::size_t>(j)];
        }
        single[static_cast<std::size_t>(i)] = theta.marginal(i) + theta.common() * (others - 1.0);
    }
    return g * partition_sum(mask, single, theta.common(), u);
}

double pmf_bp_convolution(int x1, int x2, const ThetaBP& theta) {
    if (x1 < 0 || x2 < 0) return 0.0;
    const double r1 = theta.reduced1();
    const double r2 = theta.reduced2();
    const double t3 = theta.theta3();
    const int kmax = std::min(x1, x2);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) {
        terms.push_back(log_power(r1, x1 - k) + log_power(r2, x2 - k) + log_power(t3, k) -
                        log_factorial(x1 - k) - log_factorial(x2 - k) - log_factorial(k));
    }
    return std::exp(-(r1 + r2 + t3) + log_sum_exp(terms));
}

PmfTableBP::PmfTableBP(int max1, int max2, const ThetaBP& theta) : max1_(max1), max2_(max2) {
    if (max1 < 0 || max2 < 0) throw DomainError("PmfTableBP: negative extent");
    const auto w = static_cast<std::size_t>(max2) + 1;
    p_.assign((static_cast<std::size_t>(max1) + 1) * w, 0.0);
    auto at = [&](int i, int j) -> double& { return p_[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)]; };
    auto get = [&](int i, int j) { return (i < 0 || j < 0) ? 0.0 : at(i, j); };

    const double r1 = theta.reduced1();
    const double r2 = theta.reduced2();
    const double t3 = theta.theta3();
    const double c0 = t3 + r1 * r2;
    const double c1 = t3 * r1;
    const double c2 = t3 * r2;
    const double c3 = t3 * t3;

    at(0, 0) = std::exp(-(r1 + r2 + t3));
    for (int i = 1; i <= max1; ++i) at(i, 0) = at(i - 1, 0) * r1 / i;
    for (int j = 1; j <= max2; ++j) at(0, j) = at(0, j - 1) * r2 / j;
    for (int i = 0; i < max1; ++i) {
        for (int j = 0; j < max2; ++j) {
            at(i + 1, j + 1) = (c0 * get(i, j) + c1 * get(i - 1, j) + c2 * get(i, j - 1) + c3 * get(i - 1, j - 1)) /
                               (static_cast<double>(i + 1) * static_cast<double>(j + 1));
        }
    }
    // All recurrence terms are nonnegative, so only underflow can spoil the
    // table; recompute those cells in log space.
    for (int i = 0; i <= max1; ++i) {
        for (int j = 0; j <= max2; ++j) {
            if (at(i, j) < DBL_MIN) {
                at(i, j) = pmf_bp_convolution(i, j, theta);
                log_fallback_ = true;
            }
        }
    }
}

double PmfTableBP::operator()(int i, int j) const {
    if (i < 0 || j < 0) return 0.0;
    if (i > max1_ || j > max2_) throw std::out_of_range("PmfTableBP index beyond table");
    return p_[static_cast<std::size_t>(i) * (static_cast<std::size_t>(max2_) + 1) + static_cast<std::size_t>(j)];
}

double pmf_bp_recurrence(int x1, int x2, const ThetaBP& theta) {
    if (x1 < 0 || x2 < 0) return 0.0;
    return PmfTableBP(x1, x2, theta)(x1, x2);
}

double pmf_tp(std::array<int, 3> x, const ThetaTP& theta) {
    if (x[0] < 0 || x[1] < 0 || x[2] < 0) return 0.0;
    const double t4 = theta.theta(4);
    const int kmax = std::min({x[0], x[1], x[2]});
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) {
        double t = log_power(t4, k) - log_factorial(k);
        for (int i = 0; i < 3; ++i) {
            t += log_power(theta.reduced(i + 1), x[static_cast<std::size_t>(i)] - k) -
                 log_factorial(x[static_cast<std::size_t>(i)] - k);
        }
        terms.push_back(t);
    }
    const double lambda = theta.reduced(1) + theta.reduced(2) + theta.reduced(3) + t4;
    return std::exp(-lambda + log_sum_exp(terms));
}

void draw_common_shock(std::span<const double> reduced, double common, Stream& rng, std::span<int> out) {
    const auto shared = static_cast<int>(poisson_variate(common, rng));
    for (std::size_t k = 0; k < reduced.size(); ++k) {
        out[k] = shared + static_cast<int>(poisson_variate(reduced[k], rng));
    }
}

CountSample sample_mv(const ThetaMV& theta, std::size_t n, Stream& rng) {
    if (n == 0) throw DomainError("sample size must be >= 1");
    const auto m = static_cast<std::size_t>(theta.dim());
    std::vector<double> reduced(m);
    for (std::size_t k = 0; k < m; ++k) reduced[k] = theta.reduced(static_cast<int>(k));
    std::vector<int> flat(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        draw_common_shock(reduced, theta.common(), rng, std::span<int>(flat.data() + i * m, m));
    }
    return CountSample(static_cast<int>(m), std::move(flat));
}

CountSample sample_bp(const ThetaBP& theta, std::size_t n, Stream& rng) {
    return sample_mv(theta.to_mv(), n, rng);
}

CountSample sample_tp(const ThetaTP& theta, std::size_t n, Stream& rng) {
    return sample_mv(theta.to_mv(), n, rng);
}

} // namespace bpgof
