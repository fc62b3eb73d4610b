#include "bpgof/rng.hpp"

#include <cmath>
#include <vector>

#include "bpgof/error.hpp"

namespace bpgof {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

Stream::Stream(std::uint64_t seed)
    : Stream(splitmix64(seed), splitmix64(seed ^ 0x5851F42D4C957F2Dull)) {}

Stream::Stream(std::uint64_t id0, std::uint64_t id1) : id0_(id0), id1_(id1) {}

Stream Stream::derive(std::string_view tag, std::initializer_list<std::uint64_t> indices) const {
    std::uint64_t h0 = splitmix64(id0_ ^ fnv1a(tag));
    std::uint64_t h1 = splitmix64(id1_ + 0x2545F4914F6CDD1Dull * (indices.size() + 1));
    for (std::uint64_t idx : indices) {
        h0 = splitmix64(h0 ^ splitmix64(idx));
        h1 = splitmix64(h1 + h0);
    }
    return Stream(h0, h1);
}

void Stream::refill() {
    const std::array<std::uint32_t, 4> counter{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(id1_), static_cast<std::uint32_t>(id1_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(id0_),
                                           static_cast<std::uint32_t>(id0_ >> 32)};
    buffer_ = philox4x32_10(counter, key);
    ++block_;
    used_ = 0;
}

Stream::result_type Stream::operator()() {
    if (used_ > 2) refill();
    const std::uint64_t lo = buffer_[used_];
    const std::uint64_t hi = buffer_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double Stream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double log_factorial(std::int64_t k) {
    constexpr std::int64_t kTable = 1024;
    static const std::vector<double> table = [] {
        std::vector<double> t(kTable);
        t[0] = 0.0;
        for (std::int64_t i = 1; i < kTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
        return t;
    }();
    if (k < 0) throw DomainError("log_factorial: negative argument");
    if (k < kTable) return table[static_cast<std::size_t>(k)];
    // Stirling series for log Gamma(k+1); error below 1e-16 relative at k >= 1024.
    const double x = static_cast<double>(k) + 1.0;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return (x - 0.5) * std::log(x) - x + 0.91893853320467274178 +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

std::int64_t poisson_variate(double mean, Stream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson_variate: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double u = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        // Tail beyond k=200 has mass < 1e-150 for mean < 10.
        while (u > cdf && k < 200) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        const auto k = static_cast<std::int64_t>(kd);
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + kd * loglam - log_factorial(k)) {
            return k;
        }
    }
}

} // namespace bpgof
