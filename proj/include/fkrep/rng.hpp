#pragma once

#include <array>
#include <cstdint>

namespace fkrep {

// Counter-based RNG (Philox4x32-10). A stream is (key, counter); output is a
// pure function of both, so replicas can be given pre-assigned streams and
// results do not depend on scheduling or worker count.
class CounterRng {
  public:
    CounterRng() : CounterRng(0) {}
    explicit CounterRng(uint64_t seed) : key_(seed), counter_(0), have_(0) {}

    // Derives an independent stream; used as split(replica), split(edge), ...
    CounterRng split(uint64_t label) const
    {
        return CounterRng(mix64(key_ ^ mix64(label ^ 0x9e3779b97f4a7c15ull)));
    }

    uint64_t next_u64()
    {
        if (have_ == 0)
            refill();
        uint32_t hi = buf_[--have_];
        uint32_t lo = buf_[--have_];
        return (uint64_t(hi) << 32) | lo;
    }

    // uniform in [0,1) with 53 random bits
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n)
    {
        // rejection-free is not needed here; 64-bit modulo bias is < 2^-40
        // for every n used in this codebase (n < 2^24)
        return next_u64() % n;
    }

    uint64_t key() const { return key_; }

  private:
    static uint64_t mix64(uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    void refill()
    {
        uint32_t c0 = uint32_t(counter_), c1 = uint32_t(counter_ >> 32);
        uint32_t x0 = c0, x1 = c1, x2 = 0x2e272ca6u, x3 = 0x41c64e6du;
        uint32_t k0 = uint32_t(key_), k1 = uint32_t(key_ >> 32);
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = 0xD2511F53ull * x0;
            uint64_t p1 = 0xCD9E8D57ull * x2;
            uint32_t h0 = uint32_t(p0 >> 32), l0 = uint32_t(p0);
            uint32_t h1 = uint32_t(p1 >> 32), l1 = uint32_t(p1);
            uint32_t y0 = h1 ^ x1 ^ k0;
            uint32_t y1 = l1;
            uint32_t y2 = h0 ^ x3 ^ k1;
            uint32_t y3 = l0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = {x0, x1, x2, x3};
        have_ = 4;
        ++counter_;
    }

    uint64_t key_;
    uint64_t counter_;
    std::array<uint32_t, 4> buf_;
    int have_;
};

} // namespace fkrep
