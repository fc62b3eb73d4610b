#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <initializer_list>

namespace bpgof {

/// Philox4x32-10 block function (Salmon et al. 2011). Pure; exposed for
/// known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// A stream is identified by 128 bits: 64 go into the Philox key, 64 into the
/// upper half of the counter. The lower half of the counter is the block
/// index, so a stream yields 2^64 blocks before wrapping. Substreams are
/// derived by hashing (identity, tag, indices), which makes every consumer's
/// draws a pure function of the master seed and its own coordinates,
/// independent of scheduling.
///
/// Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed);

    /// Independent child stream keyed by (this identity, tag, indices).
    Stream derive(std::string_view tag, std::initializer_list<std::uint64_t> indices = {}) const;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform on [0,1) with 53 random bits.
    double uniform();
    /// Uniform on (0,1); never returns 0.
    double uniform_open();

    std::uint64_t id_low() const { return id0_; }
    std::uint64_t id_high() const { return id1_; }

private:
    Stream(std::uint64_t id0, std::uint64_t id1);
    void refill();

    std::uint64_t id0_;
    std::uint64_t id1_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4; // 32-bit words consumed from buffer_
};

/// Poisson variate: sequential inversion below mean 10, transformed
/// rejection (PTRS, Hormann 1993) otherwise. mean == 0 returns 0.
std::int64_t poisson_variate(double mean, Stream& rng);

/// log(k!) via a static table for small k, Stirling series beyond.
double log_factorial(std::int64_t k);

} // namespace bpgof
