#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace varelim {

/// Fixed-capacity dynamic bitset used for relation rows and domains.
///
/// Word-level helpers (`intersects`, `any_and_not`, `is_subset_of`) are the
/// hot kernels of every support test in the library; they never allocate.
class Bitset {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    Bitset() = default;
    explicit Bitset(std::size_t nbits, bool value = false)
        : words_((nbits + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}), nbits_(nbits)
    {
        trim();
    }

    std::size_t size() const { return nbits_; }
    const std::vector<Word>& words() const { return words_; }

    bool test(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set(std::size_t i) { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
    void reset(std::size_t i) { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }
    void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }

    void set_all()
    {
        for (auto& w : words_)
            w = ~Word{0};
        trim();
    }
    void reset_all()
    {
        for (auto& w : words_)
            w = 0;
    }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool any() const
    {
        for (auto w : words_)
            if (w)
                return true;
        return false;
    }
    bool none() const { return !any(); }

    /// Index of the lowest set bit, or size() when empty.
    std::size_t first() const { return next(0); }

    /// Lowest set bit with index >= from, or size() when there is none.
    std::size_t next(std::size_t from) const
    {
        if (from >= nbits_)
            return nbits_;
        std::size_t wi = from / kWordBits;
        Word w = words_[wi] & (~Word{0} << (from % kWordBits));
        while (true) {
            if (w)
                return wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
            if (++wi >= words_.size())
                return nbits_;
            w = words_[wi];
        }
    }

    Bitset& operator&=(const Bitset& o)
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& o)
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= o.words_[i];
        return *this;
    }
    /// this := this \ o
    Bitset& subtract(const Bitset& o)
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= ~o.words_[i];
        return *this;
    }

    bool intersects(const Bitset& o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i])
                return true;
        return false;
    }

    /// True iff (this & o & mask) is non-empty.
    bool intersects(const Bitset& o, const Bitset& mask) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i] & mask.words_[i])
                return true;
        return false;
    }

    /// True iff (this & ~o & mask) is non-empty.
    bool any_and_not(const Bitset& o, const Bitset& mask) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i] & mask.words_[i])
                return true;
        return false;
    }

    /// True iff (this & mask) is a subset of o.
    bool is_subset_of(const Bitset& o, const Bitset& mask) const { return !any_and_not(o, mask); }
    bool is_subset_of(const Bitset& o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    /// Number of set bits in (this & mask).
    std::size_t count_and(const Bitset& mask) const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & mask.words_[i]));
        return c;
    }

    /// Number of set bits in (this & ~o & mask).
    std::size_t count_and_not(const Bitset& o, const Bitset& mask) const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & ~o.words_[i] & mask.words_[i]));
        return c;
    }

    friend bool operator==(const Bitset&, const Bitset&) = default;

    template <typename F>
    void for_each(F&& f) const
    {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            Word w = words_[wi];
            while (w) {
                f(wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

private:
    void trim()
    {
        if (nbits_ % kWordBits && !words_.empty())
            words_.back() &= (Word{1} << (nbits_ % kWordBits)) - 1;
    }

    std::vector<Word> words_;
    std::size_t nbits_ = 0;
};

inline Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

} // namespace varelim
