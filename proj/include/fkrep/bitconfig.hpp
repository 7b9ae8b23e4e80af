#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkrep {

// One bit per edge id of a FiniteGraph. Bit i of the packed index equals the
// state of edge i ("little-endian" edge order).
class BondConfig {
  public:
    BondConfig() : nbits_(0) {}
    explicit BondConfig(std::size_t nbits, bool value = false)
        : nbits_(nbits), words_((nbits + 63) / 64, value ? ~0ull : 0ull)
    {
        trim();
    }

    static BondConfig from_index(uint64_t index, std::size_t nbits)
    {
        BondConfig c(nbits);
        if (nbits > 0)
            c.words_[0] = index;
        c.trim();
        return c;
    }

    std::size_t size() const { return nbits_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v)
    {
        uint64_t m = 1ull << (i & 63);
        if (v)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (uint64_t w : words_)
            n += std::popcount(w);
        return n;
    }

    bool none() const
    {
        for (uint64_t w : words_)
            if (w)
                return false;
        return true;
    }

    BondConfig& operator|=(const BondConfig& o)
    {
        check(o);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] |= o.words_[k];
        return *this;
    }
    BondConfig& operator&=(const BondConfig& o)
    {
        check(o);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] &= o.words_[k];
        return *this;
    }
    BondConfig& operator^=(const BondConfig& o)
    {
        check(o);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] ^= o.words_[k];
        return *this;
    }

    friend BondConfig operator|(BondConfig a, const BondConfig& b) { return a |= b; }
    friend BondConfig operator&(BondConfig a, const BondConfig& b) { return a &= b; }
    friend BondConfig operator^(BondConfig a, const BondConfig& b) { return a ^= b; }

    bool subset_of(const BondConfig& o) const
    {
        check(o);
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~o.words_[k])
                return false;
        return true;
    }

    bool operator==(const BondConfig& o) const
    {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }
    bool operator!=(const BondConfig& o) const { return !(*this == o); }

    // packed integer index; only valid for <= 64 edges
    uint64_t to_index() const
    {
        if (nbits_ > 64)
            throw std::invalid_argument("BondConfig::to_index: more than 64 edges");
        return nbits_ ? words_[0] : 0;
    }

    std::string to_string() const
    {
        std::string s(nbits_, '0');
        for (std::size_t i = 0; i < nbits_; ++i)
            if (get(i))
                s[i] = '1';
        return s;
    }

  private:
    void check(const BondConfig& o) const
    {
        if (nbits_ != o.nbits_)
            throw std::invalid_argument("BondConfig: mismatched edge spaces");
    }
    void trim()
    {
        if (nbits_ & 63)
            words_.back() &= (1ull << (nbits_ & 63)) - 1;
    }

    std::size_t nbits_;
    std::vector<uint64_t> words_;
};

} // namespace fkrep
