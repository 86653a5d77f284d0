#pragma once

#include <array>
#include <cstdint>

namespace barriermc {

// Philox 4x64-10 counter-based generator. Outputs are a pure function of
// (key, counter), so any draw can be addressed by index without advancing
// shared state. Matches numpy.random.Philox bit-for-bit.
struct Philox4x64 {
    static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(kMult0) * ctr[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(kMult1) * ctr[2];
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// A reproducible stream of uniforms keyed by (seed, stream_id). Draws are
// addressed by a 64-bit index; identical (seed, stream_id, index) give the
// identical value on every run and under any threading layout. Distinct
// stream ids give statistically independent sequences.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{seed, stream_id} {}

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

    // Raw 64-bit word at position `index`.
    std::uint64_t raw_at(std::uint64_t index) const {
        const std::uint64_t blk = index >> 2;
        if (blk != cached_block_ || !cache_valid_) {
            cache_ = Philox4x64::block({blk, 0, 0, 0}, key_);
            cached_block_ = blk;
            cache_valid_ = true;
        }
        return cache_[index & 3];
    }

    // Uniform draw strictly inside (0,1): bin centers of a 2^53 grid, so the
    // endpoints 0 and 1 are unreachable.
    double uniform_at(std::uint64_t index) const {
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return (static_cast<double>(raw_at(index) >> 11) + 0.5) * scale;
    }

    // Sequential interface for consumers that do not need random access.
    double next_uniform() { return uniform_at(next_index_++); }
    void reset() { next_index_ = 0; }

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t next_index_ = 0;
    mutable std::array<std::uint64_t, 4> cache_{};
    mutable std::uint64_t cached_block_ = 0;
    mutable bool cache_valid_ = false;
};

}  // namespace barriermc
