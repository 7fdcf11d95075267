#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace genuslab {

/// Index of a group element (mixed-radix encoding, see FiniteAbelianGroup).
using Element = std::uint32_t;

/// Dense bit-vector over the elements of a finite group, with a cached
/// cardinality.
class ElementSet {
public:
    ElementSet() = default;
    explicit ElementSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

    static ElementSet full(std::size_t universe) {
        ElementSet s(universe);
        for (std::size_t i = 0; i < universe; ++i) s.insert(static_cast<Element>(i));
        return s;
    }

    static ElementSet of(std::size_t universe, std::span<const Element> elems) {
        ElementSet s(universe);
        for (Element e : elems) s.insert(e);
        return s;
    }

    std::size_t universe() const { return universe_; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    bool is_full() const { return count_ == universe_; }

    bool contains(Element e) const { return (words_[e >> 6U] >> (e & 63U)) & 1U; }

    void insert(Element e) {
        std::uint64_t& w = words_[e >> 6U];
        const std::uint64_t bit = std::uint64_t{1} << (e & 63U);
        if ((w & bit) == 0) {
            w |= bit;
            ++count_;
        }
    }

    void erase(Element e) {
        std::uint64_t& w = words_[e >> 6U];
        const std::uint64_t bit = std::uint64_t{1} << (e & 63U);
        if ((w & bit) != 0) {
            w &= ~bit;
            --count_;
        }
    }

    ElementSet& operator|=(const ElementSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        recount();
        return *this;
    }

    ElementSet& operator&=(const ElementSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        recount();
        return *this;
    }

    /// Elements of this set not in o.
    ElementSet minus(const ElementSet& o) const {
        ElementSet r = *this;
        for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= ~o.words_[i];
        r.recount();
        return r;
    }

    bool subset_of(const ElementSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & ~o.words_[i]) != 0) return false;
        }
        return true;
    }

    bool operator==(const ElementSet& o) const { return universe_ == o.universe_ && words_ == o.words_; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int t = std::countr_zero(bits);
                f(static_cast<Element>(w * 64 + static_cast<std::size_t>(t)));
                bits &= bits - 1;
            }
        }
    }

    std::vector<Element> elements() const {
        std::vector<Element> out;
        out.reserve(count_);
        for_each([&](Element e) { out.push_back(e); });
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void recount() {
        count_ = 0;
        for (auto w : words_) count_ += static_cast<std::size_t>(std::popcount(w));
    }

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
    std::size_t count_ = 0;
};

}  // namespace genuslab
