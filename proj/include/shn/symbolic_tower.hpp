#ifndef SHN_SYMBOLIC_TOWER_HPP
#define SHN_SYMBOLIC_TOWER_HPP

#include "shn/core_arith.hpp"
#include "shn/min_prefix.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shn {

/// Raised when a modular tower evaluation cannot discharge its exponent
/// guard; the engine never returns a possibly-wrong residue.
struct CannotEvaluate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symbolic iterated-exponential form of gamma(eta) past materialization:
/// an exact seed value at the anchor height plus one prefix per level.
/// Level k+1 value = (A+1) * B^((value_k - H_B(A)) / (B-1)^2) - 1 where A is
/// levels[k]; every such exponent is a non-negative integer.
struct TowerGamma {
    Base base;
    unsigned anchor_height;
    BigNat seed;
    std::vector<PrefixDigits> levels;

    unsigned top_height() const { return anchor_height + static_cast<unsigned>(levels.size()); }
};

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e != 0) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline uint64_t pollard_rho(uint64_t n) {
    if ((n & 1) == 0) return 2;
    for (uint64_t c = 1;; ++c) {
        auto f = [n, c](uint64_t x) { return (mulmod_u64(x, x, n) + c) % n; };
        uint64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            uint64_t diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
    }
}

inline void factor_into(uint64_t n, std::map<uint64_t, unsigned>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        ++out[n];
        return;
    }
    uint64_t d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Integer kept in fully factored form so Euler's totient stays computable
/// along the recursion even when the running modulus outgrows 64 bits.
struct Factored {
    std::map<uint64_t, unsigned> primes;

    static Factored of(uint64_t n) {
        Factored f;
        factor_into(n, f.primes);
        return f;
    }

    BigNat value() const {
        BigNat v = 1;
        for (const auto& [p, e] : primes)
            for (unsigned i = 0; i < e; ++i) v *= static_cast<unsigned long>(p);
        return v;
    }

    Factored times(const Factored& other) const {
        Factored f = *this;
        for (const auto& [p, e] : other.primes) f.primes[p] += e;
        return f;
    }

    Factored totient() const {
        Factored f;
        for (const auto& [p, e] : primes) {
            if (e > 1) f.primes[p] += e - 1;
            std::map<uint64_t, unsigned> pm1;
            factor_into(p - 1, pm1);
            for (const auto& [q, k] : pm1) f.primes[q] += k;
        }
        return f;
    }
};

}  // namespace detail

namespace detail {

/// Exponent cap for the conservative lower-bound chain; any exponent known
/// to be at least this large dominates every modulus bit length we ever see.
constexpr unsigned long kHugeExponent = 1u << 14;

struct TowerScratch {
    std::vector<std::optional<BigNat>> exact;   // exact value per level, while it fits
    std::vector<BigNat> lower_bound;            // value lower bound, capped
    std::vector<bool> exponent_huge;            // exponent into this level >= kHugeExponent
};

inline TowerScratch tower_scratch(const TowerGamma& tg, size_t exact_bit_limit) {
    const unsigned B = tg.base.value();
    const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
    TowerScratch s;
    s.exact.resize(tg.levels.size() + 1);
    s.lower_bound.resize(tg.levels.size() + 1);
    s.exponent_huge.resize(tg.levels.size() + 1, false);
    s.exact[0] = tg.seed;
    s.lower_bound[0] = tg.seed;
    for (size_t k = 0; k < tg.levels.size(); ++k) {
        const PrefixDigits& A = tg.levels[k];
        BigNat h = static_cast<unsigned long>(A.square_sum());
        if (s.exact[k]) {
            BigNat num = *s.exact[k] - h;
            if (sgn(num) < 0 || num % c != 0)
                throw std::invalid_argument("tower level exponent is not a non-negative integer");
            BigNat e = num / c;
            if (mpz_sizeinbase(e.get_mpz_t(), 2) <= 40) {
                // bits of the level value ~ e*log2(B); materialize if modest
                double bits = mpz_get_d(e.get_mpz_t()) * std::log2(static_cast<double>(B));
                if (bits <= static_cast<double>(exact_bit_limit)) {
                    BigNat pow;
                    mpz_ui_pow_ui(pow.get_mpz_t(), B, e.get_ui());
                    s.exact[k + 1] = (A.value() + 1) * pow - 1;
                }
            }
        }
        // Conservative lower bound: value >= B^e_min - 1 with e_min from the
        // previous bound, everything saturated at kHugeExponent.
        BigNat elb = s.lower_bound[k] > h ? (s.lower_bound[k] - h) / c : BigNat(0);
        unsigned long e_capped =
            elb > static_cast<unsigned long>(kHugeExponent) ? kHugeExponent : elb.get_ui();
        s.exponent_huge[k + 1] = (e_capped >= kHugeExponent);
        BigNat pow;
        mpz_ui_pow_ui(pow.get_mpz_t(), B, e_capped);
        s.lower_bound[k + 1] = pow - 1;
        if (s.exact[k + 1] && s.exact[k + 1] > s.lower_bound[k + 1])
            s.lower_bound[k + 1] = *s.exact[k + 1];
    }
    return s;
}

inline BigNat eval_level(const TowerGamma& tg, const TowerScratch& s, size_t level,
                         const Factored& mod) {
    BigNat m = mod.value();
    if (m == 1) return 0;
    if (s.exact[level]) return *s.exact[level] % m;
    // level >= 1 here: the seed is always exact.
    const unsigned B = tg.base.value();
    const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
    const PrefixDigits& A = tg.levels[level - 1];
    const BigNat h = static_cast<unsigned long>(A.square_sum());

    BigNat exponent;  // reduced exponent to raise B to, mod m
    if (s.exact[level - 1]) {
        exponent = (*s.exact[level - 1] - h) / c;
    } else {
        // Generalized Euler: B^e = B^(phi(m) + e mod phi(m)) (mod m) for
        // e >= log2(m). The exponent is recovered modulo phi(m) by lifting
        // the recursion modulus to phi(m)*(B-1)^2 and dividing exactly.
        Factored phi = mod.totient();
        Factored lifted = phi.times(Factored::of(c));
        BigNat lifted_value = lifted.value();
        BigNat r = eval_level(tg, s, level - 1, lifted);
        r = (r - h) % lifted_value;
        if (sgn(r) < 0) r += lifted_value;
        if (r % c != 0) throw CannotEvaluate("exponent residue not divisible by (B-1)^2");
        BigNat phi_value = phi.value();
        BigNat e_mod = (r / c) % phi_value;
        // Guard: the true exponent must be at least log2(m).
        BigNat e_min = s.lower_bound[level - 1] > h ? (s.lower_bound[level - 1] - h) / c : BigNat(0);
        size_t m_bits = mpz_sizeinbase(m.get_mpz_t(), 2);
        if (!(e_min >= static_cast<unsigned long>(m_bits)))
            throw CannotEvaluate("cannot verify exponent >= log2(modulus)");
        exponent = phi_value + e_mod;
    }
    BigNat bpow, bb = B;
    mpz_powm(bpow.get_mpz_t(), bb.get_mpz_t(), exponent.get_mpz_t(), m.get_mpz_t());
    BigNat v = ((A.value() % m + 1) * bpow - 1) % m;
    if (sgn(v) < 0) v += m;
    return v;
}

}  // namespace detail

/// Exact residue value(tg) mod m, or CannotEvaluate; never a wrong answer.
/// m must factor in 64 bits (the CLI enforces m < 2^64).
inline BigNat eval_mod(const TowerGamma& tg, const BigNat& m,
                       size_t exact_bit_limit = (1u << 24)) {
    if (m < 1) throw std::invalid_argument("modulus must be >= 1");
    if (!m.fits_ulong_p()) throw std::invalid_argument("modulus must fit in 64 bits");
    detail::TowerScratch s = detail::tower_scratch(tg, exact_bit_limit);
    return detail::eval_level(tg, s, tg.levels.size(), detail::Factored::of(m.get_ui()));
}

/// value(tg) mod (B-1)^2 — the R_0 driving the next recursion step.
inline unsigned residue_class(const TowerGamma& tg) {
    const unsigned long c =
        static_cast<unsigned long>(tg.base.value() - 1) * (tg.base.value() - 1);
    return static_cast<unsigned>(eval_mod(tg, BigNat(c)).get_ui());
}

/// Materialize the tower's top value when it fits in bit_limit bits.
inline std::optional<BigNat> materialize(const TowerGamma& tg, size_t bit_limit = (1u << 24)) {
    detail::TowerScratch s = detail::tower_scratch(tg, bit_limit);
    return s.exact[tg.levels.size()];
}

/// gamma_2(eta) as a tower: seed gamma_2(1) = 2, then eta-1 empty-prefix
/// levels realizing gamma_2(k+1) = 2^gamma_2(k) - 1.
inline TowerGamma closed_form_binary(unsigned eta) {
    if (eta < 1) throw std::invalid_argument("closed_form_binary requires eta >= 1");
    TowerGamma tg{Base(2), 1, BigNat(2), {}};
    tg.levels.assign(eta - 1, PrefixDigits{Base(2), {}});
    return tg;
}

/// gamma_3(eta) as a tower: seed gamma_3(2) = 13, then eta-2 levels with
/// prefix [1] realizing gamma_3(k+1) = 2*3^((gamma_3(k)-1)/4) - 1.
inline TowerGamma closed_form_ternary(unsigned eta) {
    if (eta < 2) throw std::invalid_argument("closed_form_ternary requires eta >= 2");
    TowerGamma tg{Base(3), 2, BigNat(13), {}};
    tg.levels.assign(eta - 2, PrefixDigits{Base(3), {1}});
    return tg;
}

/// True iff 2^p - 1 is prime. Requires p prime.
inline bool lucas_lehmer(unsigned long p) {
    if (p < 2 || !detail::is_prime_u64(p)) throw std::domain_error("lucas_lehmer requires a prime exponent");
    if (p == 2) return true;
    BigNat mersenne;
    mpz_ui_pow_ui(mersenne.get_mpz_t(), 2, p);
    mersenne -= 1;
    BigNat s = 4;
    for (unsigned long i = 0; i < p - 2; ++i) {
        s = (s * s - 2) % mersenne;
    }
    return s == 0;
}

enum class MersenneStatus { Prime, Composite, Unknown };

struct MersenneEntry {
    unsigned eta;
    std::optional<BigNat> exponent;  // gamma_2(eta - 1), when materializable
    MersenneStatus status;
};

/// Conjecture evidence: gamma_2(eta) = 2^gamma_2(eta-1) - 1 tested with
/// Lucas-Lehmer while the exponent is small enough; Unknown past that.
inline std::vector<MersenneEntry> mersenne_report(unsigned eta_max,
                                                  unsigned long exponent_limit = 100000) {
    std::vector<MersenneEntry> report;
    for (unsigned eta = 2; eta <= eta_max; ++eta) {
        MersenneEntry entry{eta, std::nullopt, MersenneStatus::Unknown};
        std::optional<BigNat> exp = materialize(closed_form_binary(eta - 1));
        if (exp) {
            entry.exponent = exp;
            if (exp->fits_ulong_p() && exp->get_ui() <= exponent_limit) {
                unsigned long p = exp->get_ui();
                if (!detail::is_prime_u64(p))
                    entry.status = MersenneStatus::Composite;  // 2^p - 1 composite for composite p > 1
                else
                    entry.status = lucas_lehmer(p) ? MersenneStatus::Prime : MersenneStatus::Composite;
            }
        }
        report.push_back(std::move(entry));
    }
    return report;
}

// --- tower persistence ------------------------------------------------------

inline nlohmann::json tower_to_json(const TowerGamma& tg) {
    nlohmann::json levels = nlohmann::json::array();
    for (const PrefixDigits& level : tg.levels) levels.push_back(level.digits);
    return {{"base", tg.base.value()},
            {"anchor_height", tg.anchor_height},
            {"seed", tg.seed.get_str()},
            {"levels", levels}};
}

inline TowerGamma tower_from_json(const nlohmann::json& j) {
    TowerGamma tg{Base(j.at("base").get<unsigned>()),
                  j.at("anchor_height").get<unsigned>(),
                  BigNat(j.at("seed").get<std::string>()),
                  {}};
    for (const auto& level : j.at("levels"))
        tg.levels.push_back(PrefixDigits{tg.base, level.get<std::vector<uint32_t>>()});
    return tg;
}

}  // namespace shn

#endif  // SHN_SYMBOLIC_TOWER_HPP
