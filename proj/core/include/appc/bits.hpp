#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>

#include <boost/container/small_vector.hpp>

namespace appc {

// Fixed-universe bitset used for states and conflict rows. Universes up to
// 256 atoms live inline, which keeps trace simulation allocation-free.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t universe) : n_(universe), words_((universe + 63) / 64, 0) {}

    std::size_t universe() const { return n_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::size_t(__builtin_popcountll(w));
        return c;
    }

    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bits& operator&=(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    // this \ o
    Bits& subtract(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    bool intersects(const Bits& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    // this ⊆ o
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    bool operator==(const Bits& o) const { return n_ == o.n_ && words_ == o.words_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t x = words_[w];
            while (x) {
                unsigned b = unsigned(__builtin_ctzll(x));
                f(std::size_t(w * 64 + b));
                x &= x - 1;
            }
        }
    }

    std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto w : words_) {
            h ^= std::size_t(w);
            h *= 0x100000001b3ull;
        }
        return h;
    }

private:
    std::size_t n_ = 0;
    boost::container::small_vector<std::uint64_t, 4> words_;
};

}  // namespace appc
