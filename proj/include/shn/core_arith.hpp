#ifndef SHN_CORE_ARITH_HPP
#define SHN_CORE_ARITH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace shn {

/// Arbitrary-precision non-negative integer. Exact, never rounded.
using BigNat = mpz_class;

/// Numerical base B >= 2.
class Base {
public:
    explicit Base(unsigned value) : value_(value) {
        if (value < 2) throw std::invalid_argument("base must be >= 2");
    }
    unsigned value() const { return value_; }

    friend bool operator==(Base a, Base b) { return a.value_ == b.value_; }
    friend bool operator!=(Base a, Base b) { return a.value_ != b.value_; }

private:
    unsigned value_;
};

/// Positional representation, most-significant digit first.
/// Invariant: every digit is in [0, B-1]; no leading zero unless the
/// value is 0, which is the single digit 0.
struct DigitVec {
    Base base;
    std::vector<uint32_t> digits;
};

inline BigNat from_digits(const DigitVec& d) {
    const unsigned B = d.base.value();
    BigNat x = 0;
    for (uint32_t digit : d.digits) {
        if (digit >= B) throw std::invalid_argument("digit out of [0, B-1]");
        x *= B;
        x += digit;
    }
    return x;
}

inline DigitVec to_digits(const BigNat& x, Base base) {
    if (sgn(x) < 0) throw std::invalid_argument("negative input");
    const unsigned B = base.value();
    DigitVec out{base, {}};
    if (x == 0) {
        out.digits.push_back(0);
        return out;
    }
    if (B <= 36) {
        // GMP's radix conversion is subquadratic; repeated division is not.
        std::string s = x.get_str(static_cast<int>(B));
        out.digits.reserve(s.size());
        for (char c : s) {
            uint32_t d = (c <= '9') ? static_cast<uint32_t>(c - '0')
                                    : static_cast<uint32_t>(c - 'a' + 10);
            out.digits.push_back(d);
        }
        return out;
    }
    mpz_class rest = x, q, r;
    std::vector<uint32_t> rev;
    while (rest != 0) {
        mpz_tdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), B);
        rev.push_back(static_cast<uint32_t>(r.get_ui()));
        rest = q;
    }
    out.digits.assign(rev.rbegin(), rev.rend());
    return out;
}

/// H_B: sum of squares of the base-B digits. H_B(0) = 0.
inline BigNat happy_step(const BigNat& x, Base base) {
    DigitVec d = to_digits(x, base);
    BigNat sum = 0;
    for (uint32_t digit : d.digits) {
        uint64_t sq = static_cast<uint64_t>(digit) * digit;
        sum += static_cast<unsigned long>(sq);
    }
    return sum;
}

/// Iterates H_B from x, stopping at the first 1 or at the first repeated
/// value (cycle closure). The returned sequence starts at x and is finite.
inline std::vector<BigNat> trajectory(const BigNat& x, Base base) {
    if (x <= 0) throw std::domain_error("trajectory requires x >= 1");
    std::vector<BigNat> seq;
    std::set<BigNat> seen;
    BigNat cur = x;
    for (;;) {
        seq.push_back(cur);
        if (cur == 1) return seq;
        if (!seen.insert(cur).second) return seq;
        cur = happy_step(cur, base);
    }
}

inline bool is_happy(const BigNat& x, Base base) {
    if (x <= 0) throw std::domain_error("is_happy requires x >= 1");
    return trajectory(x, base).back() == 1;
}

/// Minimum number of happy steps from x to 1, or nullopt when the
/// trajectory falls into a cycle instead.
inline std::optional<unsigned> height(const BigNat& x, Base base) {
    if (x <= 0) throw std::domain_error("height requires x >= 1");
    std::vector<BigNat> seq = trajectory(x, base);
    if (seq.back() != 1) return std::nullopt;
    return static_cast<unsigned>(seq.size() - 1);
}

}  // namespace shn

#endif  // SHN_CORE_ARITH_HPP
