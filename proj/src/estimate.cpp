#include "bpgof/estimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <string>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// pmf evaluation at support points and their downward shifts, for a fixed theta.
class PmfProvider {
public:
    PmfProvider(const Support& sup, std::span<const double> theta) : dim_(sup.dim) {
        if (dim_ == 2) {
            table_.emplace(sup.max_count[0], sup.max_count[1], ThetaBP(theta[0], theta[1], theta[2]));
            return;
        }
        const double common = theta[static_cast<std::size_t>(dim_)];
        lambda_ = common;
        int maxk = std::numeric_limits<int>::max();
        axis_.resize(static_cast<std::size_t>(dim_));
        for (int k = 0; k < dim_; ++k) {
            const double r = theta[static_cast<std::size_t>(k)] - common;
            lambda_ += r;
            const int mk = sup.max_count[static_cast<std::size_t>(k)];
            maxk = std::min(maxk, mk);
            auto& t = axis_[static_cast<std::size_t>(k)];
            t.resize(static_cast<std::size_t>(mk) + 1);
            t[0] = 1.0;
            for (int m = 1; m <= mk; ++m) t[static_cast<std::size_t>(m)] = t[static_cast<std::size_t>(m - 1)] * r / m;
        }
        shared_.resize(static_cast<std::size_t>(maxk) + 1);
        shared_[0] = 1.0;
        for (int m = 1; m <= maxk; ++m) shared_[static_cast<std::size_t>(m)] = shared_[static_cast<std::size_t>(m - 1)] * common / m;
        scale_ = std::exp(-lambda_);
        theta_.assign(theta.begin(), theta.end());
    }

    double operator()(const int* x) const {
        for (int k = 0; k < dim_; ++k) {
            if (x[k] < 0) return 0.0;
        }
        if (dim_ == 2) return (*table_)(x[0], x[1]);
        int kmax = x[0];
        for (int k = 1; k < dim_; ++k) kmax = std::min(kmax, x[k]);
        double s = 0.0;
        for (int j = 0; j <= kmax; ++j) {
            double t = shared_[static_cast<std::size_t>(j)];
            for (int k = 0; k < dim_; ++k) t *= axis_[static_cast<std::size_t>(k)][static_cast<std::size_t>(x[k] - j)];
            s += t;
        }
        const double p = scale_ * s;
        if (p >= DBL_MIN && std::isfinite(p)) return p;
        // Linear space underflowed; redo in log space.
        return pmf_tp({x[0], x[1], x[2]}, ThetaTP(theta_[0], theta_[1], theta_[2], theta_[3]));
    }

private:
    int dim_;
    std::optional<PmfTableBP> table_;
    std::vector<std::vector<double>> axis_;
    std::vector<double> shared_;
    std::vector<double> theta_;
    double lambda_ = 0.0;
    double scale_ = 1.0;
};

// Derivative operators on the pmf. d/dtheta_k of the pgf multiplies it by
// (u_k - 1), i.e. P(x) -> P(x - e_k) - P(x); d/dtheta_common multiplies by
// (prod u - sum u + d - 1). Shifts are encoded base 3 (each digit 0..2).
struct Term {
    int code;
    double coef;
};
using Op = std::vector<Term>;

int pow3(int d) {
    int r = 1;
    for (int i = 0; i < d; ++i) r *= 3;
    return r;
}

Op first_op(int a, int d) {
    Op op;
    if (a < d) {
        op.push_back({pow3(a), 1.0});
        op.push_back({0, -1.0});
    } else {
        int ones = 0;
        for (int k = 0; k < d; ++k) ones += pow3(k);
        op.push_back({ones, 1.0});
        for (int k = 0; k < d; ++k) op.push_back({pow3(k), -1.0});
        op.push_back({0, static_cast<double>(d - 1)});
    }
    return op;
}

Op product(const Op& x, const Op& y) {
    std::map<int, double> acc;
    for (const auto& s : x) {
        for (const auto& t : y) acc[s.code + t.code] += s.coef * t.coef; // digits never carry: each <= 1
    }
    Op out;
    for (const auto& [code, coef] : acc) {
        if (coef != 0.0) out.push_back({code, coef});
    }
    return out;
}

struct Operators {
    int d;
    int codes;
    std::vector<Op> first;
    std::vector<Op> second; // (d+1) x (d+1)
    std::vector<std::array<int, 3>> shifts;
};

const Operators& operators(int d) {
    static const std::array<Operators, 2> ops = [] {
        std::array<Operators, 2> out;
        for (int d : {2, 3}) {
            Operators o;
            o.d = d;
            o.codes = pow3(d);
            for (int a = 0; a <= d; ++a) o.first.push_back(first_op(a, d));
            for (int a = 0; a <= d; ++a) {
                for (int b = 0; b <= d; ++b) o.second.push_back(product(o.first[static_cast<std::size_t>(a)], o.first[static_cast<std::size_t>(b)]));
            }
            for (int c = 0; c < o.codes; ++c) {
                std::array<int, 3> s{0, 0, 0};
                int r = c;
                for (int k = 0; k < d; ++k) {
                    s[static_cast<std::size_t>(k)] = r % 3;
                    r /= 3;
                }
                o.shifts.push_back(s);
            }
            out[static_cast<std::size_t>(d - 2)] = std::move(o);
        }
        return out;
    }();
    return ops[static_cast<std::size_t>(d - 2)];
}

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

struct LLEval {
    double ll = kNegInf;
    Vec grad;
    Mat hess;
};

bool feasible(std::span<const double> th) {
    const std::size_t d = th.size() - 1;
    if (!(th[d] > 0.0)) return false;
    for (std::size_t k = 0; k < d; ++k) {
        if (!(th[k] > th[d]) || !std::isfinite(th[k])) return false;
    }
    return true;
}

LLEval evaluate(const Support& sup, std::span<const double> th, bool derivs) {
    LLEval ev;
    const int d = sup.dim;
    const int p = d + 1;
    ev.grad = Vec::Zero(p);
    ev.hess = Mat::Zero(p, p);
    if (!feasible(th)) return ev;
    const PmfProvider pmf(sup, th);
    const Operators& ops = operators(d);
    std::array<double, 27> P{};
    std::array<int, 3> x{};
    double ll = 0.0;
    for (std::size_t s = 0; s < sup.distinct(); ++s) {
        const auto pt = sup.point(s);
        const double c = static_cast<double>(sup.counts[s]);
        const int ncodes = derivs ? ops.codes : 1;
        for (int code = 0; code < ncodes; ++code) {
            const auto& sh = ops.shifts[static_cast<std::size_t>(code)];
            for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = pt[static_cast<std::size_t>(k)] - sh[static_cast<std::size_t>(k)];
            P[static_cast<std::size_t>(code)] = pmf(x.data());
        }
        const double p0 = P[0];
        if (!(p0 > 0.0) || !std::isfinite(p0)) {
            ev.ll = kNegInf;
            return ev;
        }
        ll += c * std::log(p0);
        if (!derivs) continue;
        std::array<double, 4> g{};
        for (int a = 0; a < p; ++a) {
            double v = 0.0;
            for (const auto& t : ops.first[static_cast<std::size_t>(a)]) v += t.coef * P[static_cast<std::size_t>(t.code)];
            g[static_cast<std::size_t>(a)] = v / p0;
            ev.grad(a) += c * g[static_cast<std::size_t>(a)];
        }
        for (int a = 0; a < p; ++a) {
            for (int b = a; b < p; ++b) {
                double v = 0.0;
                for (const auto& t : ops.second[static_cast<std::size_t>(a * p + b)]) v += t.coef * P[static_cast<std::size_t>(t.code)];
                const double h = c * (v / p0 - g[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(b)]);
                ev.hess(a, b) += h;
                if (b != a) ev.hess(b, a) += h;
            }
        }
    }
    ev.ll = ll;
    return ev;
}

// Newton direction for maximization restricted to the `free` coordinates.
// Falls back to a scaled gradient step when -H is not positive definite.
Vec newton_direction(const LLEval& ev, const std::vector<int>& free) {
    const int m = static_cast<int>(free.size());
    const int p = static_cast<int>(ev.grad.size());
    Vec dir = Vec::Zero(p);
    if (m == 0) return dir;
    Mat negH(m, m);
    Vec g(m);
    for (int i = 0; i < m; ++i) {
        g(i) = ev.grad(free[static_cast<std::size_t>(i)]);
        for (int j = 0; j < m; ++j) negH(i, j) = -ev.hess(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
    }
    Eigen::LLT<Mat> llt(negH);
    Vec step;
    if (llt.info() == Eigen::Success) {
        step = llt.solve(g);
    } else {
        double shift = 1e-8 + negH.diagonal().cwiseAbs().maxCoeff();
        for (int attempt = 0; attempt < 40; ++attempt) {
            Mat reg = negH;
            reg.diagonal().array() += shift;
            Eigen::LLT<Mat> l2(reg);
            if (l2.info() == Eigen::Success) {
                step = l2.solve(g);
                break;
            }
            shift *= 4.0;
        }
        if (step.size() == 0) step = g;
    }
    for (int i = 0; i < m; ++i) dir(free[static_cast<std::size_t>(i)]) = step(i);
    return dir;
}

void project(std::vector<double>& th, double lo) {
    const std::size_t d = th.size() - 1;
    for (std::size_t k = 0; k < d; ++k) th[k] = std::max(th[k], 2.0 * lo);
    double mn = th[0];
    for (std::size_t k = 1; k < d; ++k) mn = std::min(mn, th[k]);
    th[d] = std::clamp(th[d], lo, mn - lo);
}

struct Optimizer {
    const Support& sup;
    double lo;
    double mean_min;
    std::vector<double> means;
    int evaluations = 0;

    LLEval eval(std::span<const double> th, bool derivs) {
        ++evaluations;
        return evaluate(sup, th, derivs);
    }

    // Inner damped Newton on the marginal means with the common term fixed.
    std::pair<std::vector<double>, double> profile(double common) {
        const int d = sup.dim;
        std::vector<double> th(means);
        th.push_back(common);
        for (int k = 0; k < d; ++k) th[static_cast<std::size_t>(k)] = std::max(th[static_cast<std::size_t>(k)], common + lo);
        LLEval ev = eval(th, true);
        std::vector<int> free(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) free[static_cast<std::size_t>(k)] = k;
        for (int it = 0; it < 30 && std::isfinite(ev.ll); ++it) {
            const Vec dir = newton_direction(ev, free);
            double t = 1.0;
            bool accepted = false;
            std::vector<double> cand(th);
            LLEval next;
            for (int bt = 0; bt < 40; ++bt) {
                for (int k = 0; k < d; ++k) {
                    cand[static_cast<std::size_t>(k)] = std::max(th[static_cast<std::size_t>(k)] + t * dir(k), common + lo);
                }
                next = eval(cand, true);
                if (next.ll >= ev.ll) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;
            const double gain = next.ll - ev.ll;
            th = cand;
            ev = std::move(next);
            if (gain <= 1e-12) break;
        }
        return {th, ev.ll};
    }

    // Projected Newton on all coordinates; returns (theta, ll, converged, iterations).
    std::tuple<std::vector<double>, double, bool, int> polish(std::vector<double> th, double tol, int max_iter) {
        const int d = sup.dim;
        const int p = d + 1;
        project(th, lo);
        LLEval ev = eval(th, true);
        bool converged = false;
        int it = 0;
        for (; it < max_iter && std::isfinite(ev.ll); ++it) {
            double mn = th[0];
            for (int k = 1; k < d; ++k) mn = std::min(mn, th[static_cast<std::size_t>(k)]);
            const double common = th[static_cast<std::size_t>(d)];
            const bool at_lo = common <= lo * (1.0 + 1e-9) && ev.grad(d) <= 0.0;
            const bool at_hi = common >= mn - lo * (1.0 + 1e-9) && ev.grad(d) >= 0.0;
            std::vector<int> free;
            for (int k = 0; k < d; ++k) free.push_back(k);
            if (!at_lo && !at_hi) free.push_back(d);
            double gmax = 0.0;
            for (int k : free) gmax = std::max(gmax, std::fabs(ev.grad(k)));
            if (gmax <= 1e-9) {
                converged = true;
                break;
            }
            const Vec dir = newton_direction(ev, free);
            double t = 1.0;
            bool accepted = false;
            std::vector<double> cand(static_cast<std::size_t>(p));
            LLEval next;
            for (int bt = 0; bt < 50; ++bt) {
                for (int k = 0; k < p; ++k) cand[static_cast<std::size_t>(k)] = th[static_cast<std::size_t>(k)] + t * dir(k);
                project(cand, lo);
                next = eval(cand, true);
                if (next.ll >= ev.ll) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                // No ascent left at machine precision.
                converged = gmax <= 1e-6;
                break;
            }
            const double gain = next.ll - ev.ll;
            th = cand;
            ev = std::move(next);
            if (gain <= tol) {
                double g2 = 0.0;
                for (int k : free) g2 = std::max(g2, std::fabs(ev.grad(k)));
                if (g2 <= 1e-6) {
                    converged = true;
                    ++it;
                    break;
                }
            }
        }
        return {th, ev.ll, converged, it};
    }
};

EstimateResult mle_generic(const CountSample& sample, const MleOptions& options) {
    EstimateResult start = moment_estimate(sample, options.divisor);
    const Support& sup = sample.support();
    const int d = sample.dim();

    Optimizer opt{sup, kClampEpsilon, 0.0, {}, 0};
    const auto mom = sample_moments(sample, options.divisor);
    opt.means = mom.mean;
    opt.mean_min = *std::min_element(mom.mean.begin(), mom.mean.end());
    const double lo = kClampEpsilon;
    const double hi = opt.mean_min - kClampEpsilon;

    // Golden-section search of the profile likelihood over the common term.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c1 = b - invphi * (b - a);
    double c2 = a + invphi * (b - a);
    auto f1 = opt.profile(c1);
    auto f2 = opt.profile(c2);
    const double width = 1e-3 * (hi - lo);
    int golden = 0;
    while (b - a > width && golden < 60) {
        ++golden;
        if (f1.second >= f2.second) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - invphi * (b - a);
            f1 = opt.profile(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + invphi * (b - a);
            f2 = opt.profile(c2);
        }
    }
    auto best = f1.second >= f2.second ? f1 : f2;
    // The lower endpoint is where boundary fits live; golden section only
    // approaches it asymptotically.
    auto at_lo = opt.profile(lo);
    if (at_lo.second > best.second) best = at_lo;

    auto [theta, ll, converged, iters] = opt.polish(best.first, options.tolerance, options.max_iterations);

    EstimateResult out{ThetaMV(theta), EstimatorKind::Mle, ll, converged, false, iters + golden};
    if (!(ll >= start.loglik)) {
        // Never return something worse than the initializer.
        out.theta = start.theta;
        out.loglik = start.loglik;
        out.converged = false;
    }
    const auto& t = out.theta;
    double mn = t.marginal(0);
    for (int k = 1; k < d; ++k) mn = std::min(mn, t.marginal(k));
    out.boundary_flag = t.common() <= kClampEpsilon * (1.0 + 1e-6) || t.common() >= mn - kClampEpsilon * (1.0 + 1e-6);
    return out;
}

} // namespace

const char* to_string(EstimatorKind kind) {
    return kind == EstimatorKind::Mle ? "mle" : "moment";
}

ThetaBP EstimateResult::theta_bp() const {
    if (theta.dim() != 2) throw DomainError("estimate is not bivariate");
    return ThetaBP(theta.marginal(0), theta.marginal(1), theta.common());
}

ThetaTP EstimateResult::theta_tp() const {
    if (theta.dim() != 3) throw DomainError("estimate is not trivariate");
    return ThetaTP(theta.marginal(0), theta.marginal(1), theta.marginal(2), theta.common());
}

SampleMoments sample_moments(const CountSample& sample, VarianceDivisor divisor) {
    SampleMoments m;
    m.n = sample.size();
    m.dim = sample.dim();
    const auto d = static_cast<std::size_t>(m.dim);
    m.mean.assign(d, 0.0);
    m.cov.assign(d * d, 0.0);
    const Support& sup = sample.support();
    const double n = static_cast<double>(m.n);
    for (std::size_t s = 0; s < sup.distinct(); ++s) {
        const auto pt = sup.point(s);
        for (std::size_t k = 0; k < d; ++k) m.mean[k] += static_cast<double>(sup.counts[s]) * pt[k];
    }
    for (auto& v : m.mean) v /= n;
    for (std::size_t s = 0; s < sup.distinct(); ++s) {
        const auto pt = sup.point(s);
        const double c = static_cast<double>(sup.counts[s]);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = j; k < d; ++k) m.cov[j * d + k] += c * (pt[j] - m.mean[j]) * (pt[k] - m.mean[k]);
        }
    }
    const double div = divisor == VarianceDivisor::N ? n : n - 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j; k < d; ++k) {
            m.cov[j * d + k] = div > 0.0 ? m.cov[j * d + k] / div : 0.0;
            m.cov[k * d + j] = m.cov[j * d + k];
        }
    }
    return m;
}

EstimateResult moment_estimate(const CountSample& sample, VarianceDivisor divisor) {
    if (sample.size() < 2) throw DegenerateSampleError("estimation needs n >= 2");
    const SampleMoments m = sample_moments(sample, divisor);
    const int d = m.dim;
    double mn = m.mean[0];
    for (int k = 0; k < d; ++k) {
        if (m.mean[static_cast<std::size_t>(k)] <= 0.0) {
            throw DegenerateSampleError("marginal mean of x" + std::to_string(k + 1) + " is zero");
        }
        mn = std::min(mn, m.mean[static_cast<std::size_t>(k)]);
    }
    double c = 0.0;
    int pairs = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            c += m.covariance(j, k);
            ++pairs;
        }
    }
    c /= pairs;
    const double lo = kClampEpsilon;
    const double hi = mn - kClampEpsilon;
    const double clamped = std::clamp(c, lo, hi);
    std::vector<double> values(m.mean);
    values.push_back(clamped);
    EstimateResult r{ThetaMV(values), EstimatorKind::Moment, 0.0, true, clamped != c, 0};
    r.loglik = evaluate(sample.support(), values, false).ll;
    return r;
}

double log_likelihood(const CountSample& sample, const ThetaMV& theta) {
    if (theta.dim() != sample.dim()) throw DomainError("log_likelihood: dimension mismatch");
    const Support& sup = sample.support();
    const PmfProvider pmf(sup, theta.values());
    double ll = 0.0;
    for (std::size_t s = 0; s < sup.distinct(); ++s) {
        const auto pt = sup.point(s);
        const double p = pmf(pt.data());
        if (!(p > 0.0) || !std::isfinite(p)) {
            std::string row;
            for (int v : pt) row += (row.empty() ? "" : ",") + std::to_string(v);
            throw NumericalError("pmf is not a positive finite number at row (" + row + ")");
        }
        ll += static_cast<double>(sup.counts[s]) * std::log(p);
    }
    return ll;
}

double log_likelihood(const CountSample& sample, const ThetaBP& theta) {
    return log_likelihood(sample, theta.to_mv());
}

double log_likelihood(const CountSample& sample, const ThetaTP& theta) {
    return log_likelihood(sample, theta.to_mv());
}

EstimateResult mle(const CountSample& sample, const MleOptions& options) {
    if (sample.dim() != 2) throw DomainError("mle: bivariate sample required");
    return mle_generic(sample, options);
}

EstimateResult mle_tp(const CountSample& sample, const MleOptions& options) {
    if (sample.dim() != 3) throw DomainError("mle_tp: trivariate sample required");
    return mle_generic(sample, options);
}

EstimateResult estimate(const CountSample& sample, EstimatorKind kind, const MleOptions& options) {
    if (kind == EstimatorKind::Moment) return moment_estimate(sample, options.divisor);
    return mle_generic(sample, options);
}

} // namespace bpgof
