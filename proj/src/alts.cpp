#include "bpgof/alts.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

const double kD = 1.0 - std::exp(-1.0);

// Minimal recursive-descent parser for the family text form.
class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    struct Item {
        bool group = false;
        double value = 0.0;
        std::vector<Item> items;
    };

    std::string name() {
        skip();
        std::string out;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) out += s_[pos_++];
        if (out.empty()) fail("expected a family name");
        for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return out;
    }

    Item group() {
        expect('(');
        Item g;
        g.group = true;
        for (;;) {
            skip();
            if (peek() == '(') {
                g.items.push_back(group());
            } else {
                Item v;
                v.value = expression();
                g.items.push_back(v);
            }
            skip();
            const char c = peek();
            if (c == ',' || c == ';') {
                ++pos_;
                continue;
            }
            if (c == ')') {
                ++pos_;
                return g;
            }
            fail("expected ',', ';' or ')'");
        }
    }

    void finish() {
        skip();
        if (pos_ != s_.size()) fail("trailing characters");
    }

private:
    double expression() {
        double v = factor();
        for (;;) {
            skip();
            const char c = peek();
            if (c == '*') {
                ++pos_;
                v *= factor();
            } else if (c == '/') {
                ++pos_;
                const double den = factor();
                if (den == 0.0) fail("division by zero");
                v /= den;
            } else {
                return v;
            }
        }
    }

    // decimal, 'd', or a decimal immediately followed by 'd' (e.g. "3d").
    double factor() {
        skip();
        double v = 1.0;
        bool any = false;
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == 'e' || s_[pos_] == 'E' ||
                                    ((s_[pos_] == '-' || s_[pos_] == '+') &&
                                     (pos_ == start || s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        if (pos_ > start) {
            const std::string tok(s_.substr(start, pos_ - start));
            std::size_t used = 0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                fail("bad number '" + tok + "'");
            }
            if (used != tok.size()) fail("bad number '" + tok + "'");
            any = true;
        }
        if (peek() == 'd' || peek() == 'D') {
            ++pos_;
            v *= kD;
            any = true;
        }
        if (!any) fail("expected a number");
        return v;
    }

    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("family spec '" + std::string(s_) + "': " + what + " at offset " + std::to_string(pos_));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::vector<double> flat_scalars(const Parser::Item& g, std::string_view text) {
    std::vector<double> out;
    for (const auto& it : g.items) {
        if (it.group) throw ParseError("family spec '" + std::string(text) + "': unexpected group");
        out.push_back(it.value);
    }
    return out;
}

std::string format_label(const AlternativeSpec& s) {
    std::ostringstream os;
    os.precision(6);
    const auto& p = s.params;
    os << to_string(s.family) << '(';
    switch (s.family) {
    case Family::BB:
    case Family::BNB:
    case Family::BNTA:
        os << p[0] << ';' << p[1] << ',' << p[2] << ',' << p[3];
        break;
    case Family::BPP:
        os << p[0] << ";(" << p[1] << ',' << p[2] << ',' << p[3] << ");(" << p[4] << ',' << p[5] << ',' << p[6]
           << ')';
        break;
    default:
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    }
    os << ')';
    return os.str();
}

void require(bool ok, const AlternativeSpec& s, const char* what) {
    if (!ok) throw DomainError(std::string(to_string(s.family)) + ": " + what);
}

bool finite_all(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void draw_bp(double t1, double t2, double t3, Stream& rng, std::span<int> out) {
    const double reduced[2] = {t1 - t3, t2 - t3};
    draw_common_shock(reduced, t3, rng, out);
}

// Moments of a BP component: E[X_k] = t_k, Var = t_k, Cov = t3.
void add_bp_moments(double w, double t1, double t2, double t3, double m[5]) {
    m[0] += w * t1;
    m[1] += w * t2;
    m[2] += w * (t1 + t1 * t1);
    m[3] += w * (t2 + t2 * t2);
    m[4] += w * (t3 + t1 * t2);
}

} // namespace

const char* to_string(Family f) {
    switch (f) {
    case Family::BP: return "BP";
    case Family::TP: return "TP";
    case Family::BB: return "BB";
    case Family::BNB: return "BNB";
    case Family::BPP: return "BPP";
    case Family::BNTA: return "BNTA";
    case Family::BLS: return "BLS";
    }
    return "?";
}

double FamilyMoments::correlation() const { return cov / std::sqrt(var[0] * var[1]); }

AlternativeSpec parse_alternative(std::string_view text) {
    Parser p(text);
    const std::string name = p.name();
    const Parser::Item g = p.group();
    p.finish();

    AlternativeSpec spec;
    std::size_t want = 0;
    if (name == "BP") {
        spec.family = Family::BP;
        want = 3;
    } else if (name == "TP") {
        spec.family = Family::TP;
        want = 4;
    } else if (name == "BB") {
        spec.family = Family::BB;
        want = 4;
    } else if (name == "BNB") {
        spec.family = Family::BNB;
        want = 4;
    } else if (name == "BNTA") {
        spec.family = Family::BNTA;
        want = 4;
    } else if (name == "BLS") {
        spec.family = Family::BLS;
        want = 3;
    } else if (name == "BPP") {
        spec.family = Family::BPP;
        if (g.items.size() != 3 || g.items[0].group || !g.items[1].group || !g.items[2].group) {
            throw ParseError("family spec '" + std::string(text) + "': BPP needs p;(a1,a2,a3);(b1,b2,b3)");
        }
        spec.params.push_back(g.items[0].value);
        for (int c = 1; c <= 2; ++c) {
            const auto comp = flat_scalars(g.items[static_cast<std::size_t>(c)], text);
            if (comp.size() != 3) throw ParseError("family spec '" + std::string(text) + "': BPP component needs 3 values");
            spec.params.insert(spec.params.end(), comp.begin(), comp.end());
        }
    } else {
        throw ParseError("unknown family '" + name + "'");
    }
    if (spec.family != Family::BPP) {
        spec.params = flat_scalars(g, text);
        if (spec.params.size() != want) {
            throw ParseError("family spec '" + std::string(text) + "': " + name + " needs " + std::to_string(want) +
                             " parameters");
        }
    }
    validate(spec);
    spec.label = format_label(spec);
    return spec;
}

void validate(const AlternativeSpec& s) {
    const auto& p = s.params;
    require(finite_all(p), s, "non-finite parameter");
    switch (s.family) {
    case Family::BP:
        require(p.size() == 3, s, "needs 3 parameters");
        (void)ThetaBP(p[0], p[1], p[2]);
        break;
    case Family::TP:
        require(p.size() == 4, s, "needs 4 parameters");
        (void)ThetaTP(p[0], p[1], p[2], p[3]);
        break;
    case Family::BB:
        require(p.size() == 4, s, "needs 4 parameters");
        require(p[0] >= 1.0 && std::floor(p[0]) == p[0] && p[0] <= 1e6, s, "m must be a positive integer");
        require(p[1] >= 0.0 && p[1] <= 1.0 && p[2] >= 0.0 && p[2] <= 1.0, s, "p1, p2 must lie in [0,1]");
        require(p[3] >= 0.0 && p[3] <= std::min(p[1], p[2]), s, "need 0 <= p3 <= min(p1, p2)");
        require(1.0 - p[1] - p[2] + p[3] >= -1e-15, s, "need p1 + p2 - p3 <= 1");
        break;
    case Family::BNB:
        require(p.size() == 4, s, "needs 4 parameters");
        require(p[0] > 0.0, s, "k must be > 0");
        require(p[3] >= 0.0 && p[1] >= p[3] && p[2] >= p[3] && p[1] > 0.0 && p[2] > 0.0, s,
                "need p1, p2 >= p3 >= 0 and p1, p2 > 0");
        break;
    case Family::BPP:
        require(p.size() == 7, s, "needs p and two BP components");
        require(p[0] >= 0.0 && p[0] <= 1.0, s, "mixing weight must lie in [0,1]");
        (void)ThetaBP(p[1], p[2], p[3]);
        (void)ThetaBP(p[4], p[5], p[6]);
        break;
    case Family::BNTA:
        require(p.size() == 4, s, "needs 4 parameters");
        require(p[0] > 0.0, s, "lambda must be > 0");
        require(p[1] >= 0.0 && p[2] >= 0.0 && p[3] >= 0.0, s, "cluster means must be >= 0");
        require(p[1] + p[3] > 0.0 && p[2] + p[3] > 0.0, s, "each margin needs a positive cluster mean");
        break;
    case Family::BLS: {
        require(p.size() == 3, s, "needs 3 parameters");
        require(p[0] >= 0.0 && p[1] >= 0.0 && p[2] >= 0.0, s, "parameters must be >= 0");
        const double sum = p[0] + p[1] + p[2];
        require(sum > 0.0 && sum < 1.0, s, "need 0 < t1 + t2 + t3 < 1");
        require(p[0] + p[2] > 0.0 && p[1] + p[2] > 0.0, s, "each margin needs positive mass");
        break;
    }
    }
}

std::int64_t logarithmic_variate(double s, Stream& rng) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("logarithmic series parameter must lie in (0,1)");
    // Kemp's LK algorithm.
    const double r = std::log1p(-s);
    const double v = rng.uniform_open();
    if (v >= s) return 1;
    const double q = -std::expm1(r * rng.uniform_open());
    if (v <= q * q) {
        const double k = std::floor(1.0 + std::log(v) / std::log(q));
        return k < 1.0 ? 1 : static_cast<std::int64_t>(k);
    }
    return v <= q ? 2 : 1;
}

void draw_alternative(const AlternativeSpec& s, Stream& rng, std::span<int> out) {
    const auto& p = s.params;
    switch (s.family) {
    case Family::BP:
        draw_bp(p[0], p[1], p[2], rng, out);
        return;
    case Family::TP: {
        const double reduced[3] = {p[0] - p[3], p[1] - p[3], p[2] - p[3]};
        draw_common_shock(reduced, p[3], rng, out);
        return;
    }
    case Family::BB: {
        const auto m = static_cast<int>(p[0]);
        const double both = p[3], only1 = p[1] - p[3], only2 = p[2] - p[3];
        int x1 = 0, x2 = 0;
        for (int t = 0; t < m; ++t) {
            const double u = rng.uniform();
            if (u < both) {
                ++x1;
                ++x2;
            } else if (u < both + only1) {
                ++x1;
            } else if (u < both + only1 + only2) {
                ++x2;
            }
        }
        out[0] = x1;
        out[1] = x2;
        return;
    }
    case Family::BNB: {
        const double scale = s.bnb_variant == BnbVariant::Rate1 ? 1.0 : 1.0 / p[0];
        std::gamma_distribution<double> gamma(p[0], scale);
        const double g = gamma(rng);
        draw_bp(p[1] * g, p[2] * g, p[3] * g, rng, out);
        return;
    }
    case Family::BPP:
        if (rng.uniform() < p[0]) {
            draw_bp(p[1], p[2], p[3], rng, out);
        } else {
            draw_bp(p[4], p[5], p[6], rng, out);
        }
        return;
    case Family::BNTA: {
        const auto clusters = static_cast<double>(poisson_variate(p[0], rng));
        const double reduced[2] = {clusters * p[1], clusters * p[2]};
        draw_common_shock(reduced, clusters * p[3], rng, out);
        return;
    }
    case Family::BLS: {
        // K ~ logarithmic(t1+t2+t3), then K categorical draws over the three terms.
        const double sum = p[0] + p[1] + p[2];
        const std::int64_t k = logarithmic_variate(sum, rng);
        int x1 = 0, x2 = 0;
        for (std::int64_t t = 0; t < k; ++t) {
            const double u = rng.uniform() * sum;
            if (u < p[0]) {
                ++x1;
            } else if (u < p[0] + p[1]) {
                ++x2;
            } else {
                ++x1;
                ++x2;
            }
        }
        out[0] = x1;
        out[1] = x2;
        return;
    }
    }
}

CountSample sample_alternative(const AlternativeSpec& spec, std::size_t n, Stream& rng) {
    if (n == 0) throw DomainError("sample size must be >= 1");
    validate(spec);
    const auto d = static_cast<std::size_t>(spec.dim());
    std::vector<int> flat(n * d);
    for (std::size_t i = 0; i < n; ++i) draw_alternative(spec, rng, std::span<int>(flat.data() + i * d, d));
    return CountSample(static_cast<int>(d), std::move(flat));
}

FamilyMoments theoretical_moments(const AlternativeSpec& s) {
    validate(s);
    const auto& p = s.params;
    FamilyMoments fm;
    // raw: E X1, E X2, E X1^2, E X2^2, E X1 X2
    double m[5] = {0, 0, 0, 0, 0};
    switch (s.family) {
    case Family::BP:
        add_bp_moments(1.0, p[0], p[1], p[2], m);
        break;
    case Family::TP:
        fm.mean = {p[0], p[1], p[2]};
        fm.var = {p[0], p[1], p[2]};
        fm.cov = p[3];
        return fm;
    case Family::BB: {
        const double n = p[0];
        fm.mean = {n * p[1], n * p[2]};
        fm.var = {n * p[1] * (1.0 - p[1]), n * p[2] * (1.0 - p[2])};
        fm.cov = n * (p[3] - p[1] * p[2]);
        return fm;
    }
    case Family::BNB: {
        // G with mean mu, variance v; X | G ~ BP(p1 G, p2 G, p3 G).
        const double mu = s.bnb_variant == BnbVariant::Rate1 ? p[0] : 1.0;
        const double v = s.bnb_variant == BnbVariant::Rate1 ? p[0] : 1.0 / p[0];
        fm.mean = {p[1] * mu, p[2] * mu};
        fm.var = {p[1] * mu + p[1] * p[1] * v, p[2] * mu + p[2] * p[2] * v};
        fm.cov = p[3] * mu + p[1] * p[2] * v;
        return fm;
    }
    case Family::BPP:
        add_bp_moments(p[0], p[1], p[2], p[3], m);
        add_bp_moments(1.0 - p[0], p[4], p[5], p[6], m);
        break;
    case Family::BNTA: {
        // Poisson-stopped sum: E = l E[Z], Var = l E[Z^2], Cov = l E[Z1 Z2].
        const double l = p[0];
        const double mu1 = p[1] + p[3], mu2 = p[2] + p[3];
        fm.mean = {l * mu1, l * mu2};
        fm.var = {l * (mu1 + mu1 * mu1), l * (mu2 + mu2 * mu2)};
        fm.cov = l * (p[3] + mu1 * mu2);
        return fm;
    }
    case Family::BLS: {
        const double sum = p[0] + p[1] + p[2];
        const double q = 1.0 - sum;
        const double L = -std::log1p(-sum);
        const double a = p[0] + p[2], b = p[1] + p[2];
        const double m1 = a / (q * L), m2 = b / (q * L);
        const double f1 = a * a / (q * q * L), f2 = b * b / (q * q * L);
        const double e12 = (p[2] * q + a * b) / (q * q * L);
        fm.mean = {m1, m2};
        fm.var = {f1 + m1 - m1 * m1, f2 + m2 - m2 * m2};
        fm.cov = e12 - m1 * m2;
        return fm;
    }
    }
    fm.mean = {m[0], m[1]};
    fm.var = {m[2] - m[0] * m[0], m[3] - m[1] * m[1]};
    fm.cov = m[4] - m[0] * m[1];
    return fm;
}

} // namespace bpgof
