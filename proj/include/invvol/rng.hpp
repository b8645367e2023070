#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace invvol {

// Philox 4x64 with 10 rounds: a counter-based generator.  Each (key, counter)
// pair maps to an independent 256-bit block, so per-path streams are just
// distinct keys — no sequential state to split or leapfrog.  Constants and
// round structure follow the widely used Random123 definition, so blocks are
// bit-comparable with other implementations of the same generator.
struct Philox4x64 {
    static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> key) {
        for (int round = 0;; ++round) {
            const unsigned __int128 p0 =
                static_cast<unsigned __int128>(kM0) * ctr[0];
            const unsigned __int128 p1 =
                static_cast<unsigned __int128>(kM1) * ctr[2];
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            if (round == 9) break;
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

    // 256-bit counter increment, low word first.
    static void advance(std::array<std::uint64_t, 4>& ctr) {
        if (++ctr[0] != 0) return;
        if (++ctr[1] != 0) return;
        if (++ctr[2] != 0) return;
        ++ctr[3];
    }
};

namespace detail {

// Map a 64-bit word to a double in (0, 1]: the top 53 bits plus a half-ulp
// offset.  Zero is unreachable (log() stays finite); the all-ones word rounds
// up to exactly 1.0, which Box-Muller handles (r = 0).
inline double uniform_from_bits(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Stream of standard normals for one simulation path.  The key is
// {seed, stream_id}; consecutive blocks of the 256-bit counter are mapped
// through Box-Muller, four normals per block.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{seed, stream_id} {}

    double next() {
        if (idx_ == 4) refill();
        return buf_[idx_++];
    }

  private:
    void refill() {
        const std::array<std::uint64_t, 4> w = Philox4x64::block(ctr_, key_);
        Philox4x64::advance(ctr_);
        pair(w[0], w[1], buf_[0], buf_[1]);
        pair(w[2], w[3], buf_[2], buf_[3]);
        idx_ = 0;
    }

    static void pair(std::uint64_t a, std::uint64_t b, double& z0, double& z1) {
        const double u1 = detail::uniform_from_bits(a);
        const double u2 = detail::uniform_from_bits(b);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        z0 = r * std::cos(theta);
        z1 = r * std::sin(theta);
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_{};
    std::array<double, 4> buf_{};
    int idx_ = 4;
};

}  // namespace invvol
