#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "bpgof/rng.hpp"

namespace bpgof {

/// Parameters of the m-variate common-shock Poisson law:
/// X_k = Y_k + Y_{m+1}, with E[X_k] = theta_k and Cov(X_j, X_k) = theta_{m+1}.
/// Admissible set: theta_k > theta_{m+1} > 0 for every k.
class ThetaMV {
public:
    /// values = (theta_1, ..., theta_m, theta_{m+1}); m >= 2. Throws DomainError.
    explicit ThetaMV(std::vector<double> values);

    int dim() const { return static_cast<int>(values_.size()) - 1; }
    /// 0-based marginal mean.
    double marginal(int k) const { return values_[static_cast<std::size_t>(k)]; }
    double common() const { return values_.back(); }
    /// theta_k - theta_{m+1}: mean of the private component Y_k.
    double reduced(int k) const { return marginal(k) - common(); }
    std::span<const double> values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Bivariate Poisson parameters (theta1, theta2, theta3).
class ThetaBP {
public:
    ThetaBP(double theta1, double theta2, double theta3);

    double theta1() const { return t_[0]; }
    double theta2() const { return t_[1]; }
    double theta3() const { return t_[2]; }
    double reduced1() const { return t_[0] - t_[2]; }
    double reduced2() const { return t_[1] - t_[2]; }
    std::array<double, 3> values() const { return t_; }
    ThetaMV to_mv() const { return ThetaMV({t_[0], t_[1], t_[2]}); }

private:
    std::array<double, 3> t_;
};

/// Trivariate Poisson parameters (theta1, theta2, theta3, theta4).
class ThetaTP {
public:
    ThetaTP(double theta1, double theta2, double theta3, double theta4);

    double theta(int k) const { return t_[static_cast<std::size_t>(k - 1)]; } // k = 1..4
    double reduced(int k) const { return t_[static_cast<std::size_t>(k - 1)] - t_[3]; } // k = 1..3
    std::array<double, 4> values() const { return t_; }
    ThetaMV to_mv() const { return ThetaMV({t_[0], t_[1], t_[2], t_[3]}); }

private:
    std::array<double, 4> t_;
};

/// Distinct rows of a sample with their multiplicities, sorted lexicographically.
struct Support {
    int dim = 0;
    std::size_t n = 0;              // total observations
    std::vector<int> points;        // distinct rows, flat row-major
    std::vector<std::size_t> counts;
    std::vector<int> max_count;     // per axis

    std::size_t distinct() const { return counts.size(); }
    std::span<const int> point(std::size_t s) const {
        return {points.data() + s * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

/// n observed nonnegative integer d-tuples, d in {2, 3}. Immutable.
class CountSample {
public:
    /// flat is row-major with rows of length dim. Throws DomainError on
    /// negative entries, ragged data, empty sample, or dim outside {2,3}.
    CountSample(int dim, std::vector<int> flat);

    static CountSample from_pairs(std::span<const std::array<int, 2>> rows);
    static CountSample from_triples(std::span<const std::array<int, 3>> rows);

    int dim() const { return dim_; }
    std::size_t size() const { return data_.size() / static_cast<std::size_t>(dim_); }
    int operator()(std::size_t i, int k) const { return data_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(k)]; }
    std::span<const int> row(std::size_t i) const {
        return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    std::span<const int> flat() const { return data_; }
    const Support& support() const { return support_; }

    CountSample concat(const CountSample& other) const;
    /// Projection onto the given axes (e.g. {0,1} of a trivariate sample).
    CountSample project(std::span<const int> axes) const;

private:
    int dim_;
    std::vector<int> data_;
    Support support_;
};

double poisson_pmf(int k, double mean);

/// Joint pgf exp{theta1(u1-1) + theta2(u2-1) + theta3(u1-1)(u2-1)}; u in [0,1]^2.
double pgf_bp(std::array<double, 2> u, const ThetaBP& theta);
/// Trivariate pgf; u in [0,1]^3.
double pgf_tp(std::array<double, 3> u, const ThetaTP& theta);
/// m-variate pgf exp{sum theta_i(u_i-1) + theta_{m+1}(prod u_i - sum u_i + m - 1)}.
double pgf_m(std::span<const double> u, const ThetaMV& theta);

/// Mixed partial derivative of the m-variate pgf over the axes set in mask
/// (bit k = axis k, each differentiated once). mask == 0 gives the pgf.
double pgf_m_partial(std::span<const double> u, const ThetaMV& theta, unsigned mask);

/// Bivariate pmf as the convolution over the shared component, each term in log space.
double pmf_bp_convolution(int x1, int x2, const ThetaBP& theta);

/// Table P[i][j], 0 <= i <= max1, 0 <= j <= max2, filled with the
/// coefficient-matching recurrence. Row/column 0 come from
/// P(i,0) = e^{-theta2} Pois(i; theta1'), the marginal structure of the
/// common-shock law; interior cells from
/// (i+1)(j+1) P(i+1,j+1) = c0 P(i,j) + c1 P(i-1,j) + c2 P(i,j-1) + c3 P(i-1,j-1).
class PmfTableBP {
public:
    PmfTableBP(int max1, int max2, const ThetaBP& theta);

    int max1() const { return max1_; }
    int max2() const { return max2_; }
    /// Zero for negative indices; throws std::out_of_range beyond the table.
    double operator()(int i, int j) const;
    /// True when the linear-space recurrence underflowed and cells were
    /// recomputed by the log-space convolution.
    bool used_log_fallback() const { return log_fallback_; }

private:
    int max1_;
    int max2_;
    std::vector<double> p_;
    bool log_fallback_ = false;
};

double pmf_bp_recurrence(int x1, int x2, const ThetaBP& theta);

/// Trivariate pmf by convolution over the shared component.
double pmf_tp(std::array<int, 3> x, const ThetaTP& theta);

/// Common-shock draw with private means `reduced` (each >= 0) and shared mean
/// `common` (>= 0); returns X_k = Y_k + Y_shared. Used by null and
/// alternative samplers alike.
void draw_common_shock(std::span<const double> reduced, double common, Stream& rng, std::span<int> out);

CountSample sample_bp(const ThetaBP& theta, std::size_t n, Stream& rng);
CountSample sample_tp(const ThetaTP& theta, std::size_t n, Stream& rng);
CountSample sample_mv(const ThetaMV& theta, std::size_t n, Stream& rng);

} // namespace bpgof
