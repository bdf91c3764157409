#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace cavsq
{

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * The key is the 64-bit base seed and the upper two counter words hold the
 * stream id, so stream i of seed s is the same sequence no matter which
 * thread draws it.
 */
class Philox4x32
{
  public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (pos_ == 4)
            refill();
        std::uint64_t const hi = buf_[pos_++];
        std::uint64_t const lo = buf_[pos_++];
        return (hi << 32) | lo;
    }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double const r = std::sqrt(-2.0 * std::log(uniform()));
        double const phi = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    static Block bijection(Block ctr, Key key)
    {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += w0;
                key[1] += w1;
            }
            std::uint64_t const p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            std::uint64_t const p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto const lo0 = static_cast<std::uint32_t>(p0);
            auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto const lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

  private:
    void refill()
    {
        Block const ctr{static_cast<std::uint32_t>(block_),
                        static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(stream_),
                        static_cast<std::uint32_t>(stream_ >> 32)};
        buf_ = bijection(ctr, key_);
        ++block_;
        pos_ = 0;
    }

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buf_{};
    int pos_ = 4;
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace cavsq
