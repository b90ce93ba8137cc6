#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "distinguo/errors.hpp"

namespace distinguo {

// Cardinality of a set of realizations: either a natural number or infinity.
// Infinity compares greater than every finite value.
class Count {
public:
    static Count finite(std::uint64_t k) { return Count(false, k); }
    static Count infinite() { return Count(true, 0); }

    bool is_finite() const { return !infinite_; }
    bool is_infinite() const { return infinite_; }

    std::uint64_t value() const {
        if (infinite_) throw Error("Count: value() called on an infinite count");
        return value_;
    }

    friend bool operator==(const Count& a, const Count& b) {
        return a.infinite_ == b.infinite_ && a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const Count& a, const Count& b) {
        if (a.infinite_ != b.infinite_)
            return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
        return a.value_ <=> b.value_;
    }

    // Serialized form: "fin:k" or "inf".
    std::string str() const {
        return infinite_ ? "inf" : "fin:" + std::to_string(value_);
    }

private:
    Count(bool inf, std::uint64_t v) : infinite_(inf), value_(v) {}
    bool infinite_;
    std::uint64_t value_;
};

inline Count count_add(const Count& a, const Count& b) {
    if (a.is_infinite() || b.is_infinite()) return Count::infinite();
    return Count::finite(a.value() + b.value());
}

// Product with the convention 0 * infinity = 0 (an empty choice kills the factor).
inline Count count_mul(const Count& a, const Count& b) {
    if (a == Count::finite(0) || b == Count::finite(0)) return Count::finite(0);
    if (a.is_infinite() || b.is_infinite()) return Count::infinite();
    return Count::finite(a.value() * b.value());
}

// Number of injective assignments of k distinct items drawn from `pool` elements:
// pool * (pool-1) * ... * (pool-k+1). Infinite pools give infinity for k >= 1.
inline Count falling_factorial(const Count& pool, std::uint64_t k) {
    if (k == 0) return Count::finite(1);
    if (pool.is_infinite()) return Count::infinite();
    std::uint64_t n = pool.value();
    if (n < k) return Count::finite(0);
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < k; ++i) r *= (n - i);
    return Count::finite(r);
}

}  // namespace distinguo
