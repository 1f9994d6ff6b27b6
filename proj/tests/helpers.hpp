// Test-only oracles, independent of the library's search paths.
#ifndef SHN_TESTS_HELPERS_HPP
#define SHN_TESTS_HELPERS_HPP

#include "shn/core_arith.hpp"
#include "shn/min_prefix.hpp"
#include "shn/symbolic_tower.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace shn_test {

/// Exhaustive minimum over ALL digit strings (any order) with digits in
/// [1, B-2] and square sum R: depth-first over lengths 1, 2, ... taking the
/// first length admitting a solution, tracking the smallest value found.
inline std::optional<shn::BigNat> min_with_square_sum_exhaustive(uint64_t R, shn::Base base) {
    const uint32_t B = base.value();
    if (R == 0) return shn::BigNat(0);
    const uint64_t hi = static_cast<uint64_t>(B - 2) * (B - 2);
    for (uint64_t len = 1; len <= R; ++len) {
        std::optional<shn::BigNat> best;
        std::vector<uint32_t> digits;
        auto dfs = [&](auto&& self, uint64_t rest, uint64_t slots) -> void {
            if (slots == 0) {
                if (rest != 0) return;
                shn::BigNat v = shn::from_digits(shn::DigitVec{base, digits});
                if (!best || v < *best) best = v;
                return;
            }
            if (rest < slots || rest > slots * hi) return;
            for (uint32_t d = 1; d <= B - 2; ++d) {
                uint64_t sq = static_cast<uint64_t>(d) * d;
                if (sq > rest) break;
                digits.push_back(d);
                self(self, rest - sq, slots - 1);
                digits.pop_back();
            }
        };
        dfs(dfs, R, len);
        if (best) return best;
    }
    return std::nullopt;
}

/// Split x (base B) into its trailing run of B-1 digits and the rest:
/// returns {number of non-(B-1) digits, number of trailing B-1 digits}.
inline std::pair<uint64_t, uint64_t> tail_decompose(const shn::BigNat& x, shn::Base base) {
    shn::DigitVec d = shn::to_digits(x, base);
    const uint32_t top = base.value() - 1;
    uint64_t t = 0;
    for (auto it = d.digits.rbegin(); it != d.digits.rend() && *it == top; ++it) ++t;
    return {d.digits.size() - t, t};
}

/// Random tower with integral level exponents, materializable at every
/// level under max_bits. Levels are forced valid by padding the prefix with
/// 1-digits until its square sum matches the required residue.
inline shn::TowerGamma random_tower(std::mt19937_64& rng, size_t max_bits) {
    const unsigned B = 3 + static_cast<unsigned>(rng() % 6);  // bases 3..8
    shn::Base base(B);
    const uint64_t c = static_cast<uint64_t>(B - 1) * (B - 1);
    shn::TowerGamma tg{base, 0, shn::BigNat(static_cast<unsigned long>(2 + rng() % 5000)), {}};
    shn::BigNat value = tg.seed;
    unsigned levels = 1 + static_cast<unsigned>(rng() % 3);
    for (unsigned k = 0; k < levels; ++k) {
        shn::PrefixDigits prefix{base, {}};
        unsigned extra = static_cast<unsigned>(rng() % 3);
        for (unsigned i = 0; i < extra && B > 3; ++i)
            prefix.digits.push_back(1 + static_cast<uint32_t>(rng() % (B - 2)));
        std::sort(prefix.digits.begin(), prefix.digits.end());
        // pad with ones so that H(A) == value mod (B-1)^2
        uint64_t need = mpz_fdiv_ui(value.get_mpz_t(), c);
        uint64_t have = prefix.square_sum() % c;
        uint64_t ones = (need + c - have) % c;
        prefix.digits.insert(prefix.digits.begin(), static_cast<size_t>(ones), 1);
        shn::BigNat h = static_cast<unsigned long>(prefix.square_sum());
        if (value < h) {  // keep the exponent non-negative
            prefix.digits.assign(static_cast<size_t>(mpz_fdiv_ui(value.get_mpz_t(), c)), 1);
            h = static_cast<unsigned long>(prefix.square_sum());
        }
        shn::BigNat exponent = (value - h) / static_cast<unsigned long>(c);
        double bits = mpz_get_d(exponent.get_mpz_t()) * std::log2(static_cast<double>(B));
        if (bits > static_cast<double>(max_bits)) break;
        tg.levels.push_back(prefix);
        shn::BigNat pow;
        mpz_ui_pow_ui(pow.get_mpz_t(), B, exponent.get_ui());
        value = (tg.levels.back().value() + 1) * pow - 1;
    }
    return tg;
}

}  // namespace shn_test

#endif
