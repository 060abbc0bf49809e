// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tiltcov {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// A block is a pure function of (counter, key); there is no hidden state.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Independent random stream for one (seed, stream id) pair.
///
/// Word i of stream s under seed k is fixed by (k, s, i) alone, so trials
/// can run on any thread in any order and still see the same numbers.
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class RandomStream {
public:
    using result_type = std::uint32_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (lane_ == 4) {
            refill();
        }
        return buffer_[lane_++];
    }

    std::uint64_t next_u64() noexcept
    {
        const std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    std::uint64_t blocks_consumed() const noexcept { return block_index_; }

private:
    void refill() noexcept
    {
        buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_index_),
                                     static_cast<std::uint32_t>(block_index_ >> 32), stream_lo_,
                                     stream_hi_},
                                    key_);
        ++block_index_;
        lane_ = 0;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Counter buffer_{};
    int lane_ = 4;
};

} // namespace tiltcov
