#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace toricnn {

// Flat bit array packed into 64-bit words. Used for error configurations
// (bits over faces) and syndromes (bits over edges); XOR and popcount are
// the hot operations.
class BitField {
public:
    BitField() = default;
    explicit BitField(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    size_t size() const { return nbits_; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(size_t i, bool v) {
        const uint64_t mask = 1ULL << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void toggle(size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    size_t count() const {
        size_t n = 0;
        for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
        return n;
    }

    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }

    BitField& operator^=(const BitField& other) {
        if (other.nbits_ != nbits_) throw std::invalid_argument("BitField size mismatch");
        for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
        return *this;
    }

    friend BitField operator^(BitField a, const BitField& b) { return a ^= b; }

    bool operator==(const BitField& other) const {
        return nbits_ == other.nbits_ && words_ == other.words_;
    }

    size_t overlap(const BitField& other) const {
        if (other.nbits_ != nbits_) throw std::invalid_argument("BitField size mismatch");
        size_t n = 0;
        for (size_t i = 0; i < words_.size(); ++i)
            n += static_cast<size_t>(std::popcount(words_[i] & other.words_[i]));
        return n;
    }

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            uint64_t w = words_[wi];
            while (w) {
                const int b = std::countr_zero(w);
                fn(wi * 64 + static_cast<size_t>(b));
                w &= w - 1;
            }
        }
    }

    std::vector<size_t> set_bits() const {
        std::vector<size_t> out;
        out.reserve(count());
        for_each_set([&](size_t i) { out.push_back(i); });
        return out;
    }

    const std::vector<uint64_t>& words() const { return words_; }

private:
    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

} // namespace toricnn
