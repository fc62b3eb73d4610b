#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpgof/model.hpp"
#include "bpgof/rng.hpp"

namespace bpgof {

/// Data-generating families for size and power runs.
///
///   BP(t1,t2,t3)            null bivariate Poisson
///   TP(t1,t2,t3,t4)         null trivariate Poisson
///   BB(m;p1,p2,p3)          sum of m iid Bernoulli pairs, P(Z1=Z2=1) = p3
///   BNB(k;p1,p2,p3)         BP(p1 G, p2 G, p3 G) with G ~ Gamma(k, 1)
///   BPP(p;(a1,a2,a3);(b1,b2,b3))  p BP(a) + (1-p) BP(b)
///   BNTA(l;t1,t2,t3)        Poisson(l) number of clusters, each (Y1+Y3, Y2+Y3)
///                           with Y_k ~ Poisson(t_k) independent
///   BLS(t1,t2,t3)           bivariate logarithmic series,
///                           pgf log(1 - t1 u1 - t2 u2 - t3 u1 u2) / log(1 - t1 - t2 - t3)
enum class Family { BP, TP, BB, BNB, BPP, BNTA, BLS };

/// How the gamma frailty of BNB is scaled. Rate1 (default) uses G ~ Gamma(k, 1),
/// which reproduces the 1 + p dispersion pattern of the reference rows.
/// UnitMean uses G ~ Gamma(k, 1/k).
enum class BnbVariant { Rate1, UnitMean };

struct AlternativeSpec {
    Family family = Family::BP;
    std::vector<double> params; // flat; BPP is (p, a1, a2, a3, b1, b2, b3)
    std::string label;          // canonical text form
    BnbVariant bnb_variant = BnbVariant::Rate1;

    int dim() const { return family == Family::TP ? 3 : 2; }
};

const char* to_string(Family f);

/// Parses "BB(2;0.61,0.01,0.01)", "BPP(0.40;(0.2,0.2,0.1);(1.0,0.9,0.1))",
/// "BLS(3d/7,2d/7,2d/7)" (d = 1 - exp(-1)), "BP(1,1,0.25)", "TP(1,1,1,0.25)".
/// The separator after the leading parameter may be ';' or ','. Numbers may
/// be written as products/quotients of decimals and d. Throws ParseError for
/// syntax and DomainError for parameters outside the family's domain.
AlternativeSpec parse_alternative(std::string_view text);

/// Throws DomainError when the parameters are outside the family's domain.
void validate(const AlternativeSpec& spec);

/// Single draw into out (size spec.dim()).
void draw_alternative(const AlternativeSpec& spec, Stream& rng, std::span<int> out);

CountSample sample_alternative(const AlternativeSpec& spec, std::size_t n, Stream& rng);

struct FamilyMoments {
    std::vector<double> mean;
    std::vector<double> var;
    double cov = 0.0;  // (X1, X2)
    bool exact = true;

    double dispersion(int k) const { return var[static_cast<std::size_t>(k)] / mean[static_cast<std::size_t>(k)]; }
    double correlation() const;
};

/// Closed-form moments for every family (the trivariate cov field is for the
/// first two coordinates).
FamilyMoments theoretical_moments(const AlternativeSpec& spec);

/// Draw from the logarithmic series law P(K = k) = -s^k / (k log(1 - s)), 0 < s < 1.
std::int64_t logarithmic_variate(double s, Stream& rng);

} // namespace bpgof
