#pragma once

#include <cmath>
#include <cstdint>

namespace affine {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, path_id, step, substream); draws within a stream advance a 32-bit
// counter. Streams never overlap, so path loops can run on any number of
// workers and in any order with bit-identical output.
class CounterRng {
public:
    // Substream labels used by the simulator.
    static constexpr uint32_t kDiffusion = 0;
    static constexpr uint32_t kJump = 1;
    static constexpr uint32_t kGeneric = 2;

    CounterRng(uint64_t seed, uint64_t path_id, uint64_t step, uint32_t substream)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          c1_(substream | (static_cast<uint32_t>(step) << 8)),
          c2_(static_cast<uint32_t>(path_id)),
          c3_(static_cast<uint32_t>(path_id >> 32) ^ (static_cast<uint32_t>(step >> 24) * 0x9e3779b9u)),
          draw_(0), buf_pos_(4), have_cached_normal_(false), cached_normal_(0.0) {}

    uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    uint64_t next_u64() {
        const uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
    double uniform() {
        const uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Standard normal via Box-Muller, pairs cached.
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        have_cached_normal_ = true;
        return r * std::cos(a);
    }

private:
    static void round(uint32_t& c0, uint32_t& c1, uint32_t& c2, uint32_t& c3,
                      uint32_t k0, uint32_t k1) {
        const uint64_t p0 = 0xD2511F53ull * c0;
        const uint64_t p1 = 0xCD9E8D57ull * c2;
        const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
        const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
    }

    void refill() {
        uint32_t c0 = draw_++, c1 = c1_, c2 = c2_, c3 = c3_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int r = 0; r < 10; ++r) {
            round(c0, c1, c2, c3, k0, k1);
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = c0;
        buf_[1] = c1;
        buf_[2] = c2;
        buf_[3] = c3;
        buf_pos_ = 0;
    }

    uint32_t key0_, key1_;
    uint32_t c1_, c2_, c3_;
    uint32_t draw_;
    uint32_t buf_[4];
    int buf_pos_;
    bool have_cached_normal_;
    double cached_normal_;
};

}  // namespace affine
