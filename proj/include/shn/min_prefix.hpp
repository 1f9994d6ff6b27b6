#ifndef SHN_MIN_PREFIX_HPP
#define SHN_MIN_PREFIX_HPP

#include "shn/core_arith.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

namespace shn {

/// The A-part of a structured gamma: digits in [1, B-2], most-significant
/// first, non-decreasing left to right. An empty digit list denotes 0.
struct PrefixDigits {
    Base base;
    std::vector<uint32_t> digits;

    uint64_t square_sum() const {
        uint64_t s = 0;
        for (uint32_t d : digits) s += static_cast<uint64_t>(d) * d;
        return s;
    }

    BigNat value() const {
        BigNat v = 0;
        for (uint32_t d : digits) {
            v *= base.value();
            v += d;
        }
        return v;
    }

    friend bool operator==(const PrefixDigits& a, const PrefixDigits& b) {
        return a.base == b.base && a.digits == b.digits;
    }
};

namespace detail {

/// Can r be written as a sum of `count` squares of digits in [dmin, B-2]?
inline bool prefix_feasible(uint64_t r, uint32_t count, uint32_t dmin, uint32_t B,
                            std::map<std::tuple<uint64_t, uint32_t, uint32_t>, bool>& memo) {
    if (count == 0) return r == 0;
    const uint64_t lo = static_cast<uint64_t>(dmin) * dmin;
    const uint64_t hi = static_cast<uint64_t>(B - 2) * (B - 2);
    if (r < count * lo || r > count * hi) return false;
    auto key = std::make_tuple(r, count, dmin);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool ok = false;
    for (uint32_t d = dmin; d <= B - 2 && !ok; ++d) {
        uint64_t sq = static_cast<uint64_t>(d) * d;
        if (sq > r) break;
        ok = prefix_feasible(r - sq, count - 1, d, B, memo);
    }
    memo[key] = ok;
    return ok;
}

}  // namespace detail

/// Smallest integer whose digits all lie in [1, B-2] and whose digit
/// square sum equals R. Shortest solution first, then lexicographically
/// smallest digit string; a repunit of length R always witnesses existence.
inline PrefixDigits min_prefix(uint64_t R, Base base) {
    const uint32_t B = base.value();
    if (B < 3) throw std::invalid_argument("min_prefix requires base >= 3");
    PrefixDigits out{base, {}};
    if (R == 0) return out;
    if (B == 3) {
        out.digits.assign(static_cast<size_t>(R), 1);  // only digit 1 exists
        return out;
    }
    // Minimal length via coin-change over the digit squares.
    const uint32_t maxd = B - 2;
    std::vector<uint32_t> minlen(R + 1, UINT32_MAX);
    minlen[0] = 0;
    for (uint64_t r = 1; r <= R; ++r) {
        for (uint32_t d = 1; d <= maxd; ++d) {
            uint64_t sq = static_cast<uint64_t>(d) * d;
            if (sq > r) break;
            if (minlen[r - sq] != UINT32_MAX)
                minlen[r] = std::min(minlen[r], minlen[r - sq] + 1);
        }
    }
    uint32_t len = minlen[R];
    // Greedy lexicographic reconstruction under the non-decreasing constraint.
    std::map<std::tuple<uint64_t, uint32_t, uint32_t>, bool> memo;
    uint64_t rest = R;
    uint32_t dmin = 1;
    for (uint32_t pos = 0; pos < len; ++pos) {
        for (uint32_t d = dmin; d <= maxd; ++d) {
            uint64_t sq = static_cast<uint64_t>(d) * d;
            if (sq > rest) break;
            if (detail::prefix_feasible(rest - sq, len - pos - 1, d, B, memo)) {
                out.digits.push_back(d);
                rest -= sq;
                dmin = d;
                break;
            }
        }
    }
    return out;
}

/// Literal transcription of the candidate/state-machine search for the same
/// minimum: candidate array A*, cursor j, expansion counter D. Kept as a
/// cross-check against min_prefix; the digit multiset is returned sorted
/// ascending, the orientation that yields the numerically minimal integer.
inline PrefixDigits min_prefix_reference(uint64_t R, Base base) {
    const uint32_t B = base.value();
    if (B < 3) throw std::invalid_argument("min_prefix requires base >= 3");
    PrefixDigits out{base, {}};
    if (R == 0) return out;
    const uint64_t sq_top = static_cast<uint64_t>(B - 2) * (B - 2);
    uint64_t D = R / sq_top + 1;
    if (R % sq_top == 0) {
        out.digits.assign(static_cast<size_t>(D - 1), B - 2);
        return out;
    }
    std::vector<uint32_t> A(static_cast<size_t>(D), 1);
    size_t j = A.size() - 1;
    auto hsum = [](const std::vector<uint32_t>& v) {
        uint64_t s = 0;
        for (uint32_t d : v) s += static_cast<uint64_t>(d) * d;
        return s;
    };
    uint64_t h = hsum(A);
    while (h != R) {
        if (h > R || A[j] == B - 2) {
            if (j == 0) {
                A.assign(A.size() + 1, 1);
                j = A.size() - 1;
            } else {
                --j;
                ++A[j];
                for (size_t k = j + 1; k < A.size(); ++k) A[k] = A[j];
            }
        } else {
            j = A.size() - 1;
            ++A[j];
        }
        h = hsum(A);
    }
    out.digits = A;
    std::sort(out.digits.begin(), out.digits.end());
    return out;
}

}  // namespace shn

#endif  // SHN_MIN_PREFIX_HPP
