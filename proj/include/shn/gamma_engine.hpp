#ifndef SHN_GAMMA_ENGINE_HPP
#define SHN_GAMMA_ENGINE_HPP

#include "shn/core_arith.hpp"
#include "shn/min_prefix.hpp"
#include "shn/oracle.hpp"
#include "shn/symbolic_tower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shn {

/// gamma = A * T: prefix digits in [1, B-2] followed by t copies of B-1.
/// Value = (A+1) * B^t - 1; the form survives t far past materialization.
struct StructuredGamma {
    Base base;
    PrefixDigits prefix;
    BigNat tail_count;

    /// Digit-square-sum of the represented value, computed structurally:
    /// H_B(A) + (B-1)^2 * t.
    BigNat h_of() const {
        const unsigned long c =
            static_cast<unsigned long>(base.value() - 1) * (base.value() - 1);
        return BigNat(static_cast<unsigned long>(prefix.square_sum())) + c * tail_count;
    }

    BigNat total_length() const {
        return tail_count + static_cast<unsigned long>(prefix.digits.size());
    }

    /// Exact value when it fits in bit_limit bits.
    std::optional<BigNat> materialize(size_t bit_limit = (1u << 24)) const {
        const unsigned B = base.value();
        if (!tail_count.fits_ulong_p()) return std::nullopt;
        unsigned long t = tail_count.get_ui();
        double bits = (static_cast<double>(t) + prefix.digits.size() + 1) *
                      std::log2(static_cast<double>(B));
        if (bits > static_cast<double>(bit_limit)) return std::nullopt;
        BigNat pow;
        mpz_ui_pow_ui(pow.get_mpz_t(), B, t);
        return (prefix.value() + 1) * pow - 1;
    }
};

/// Total order agreeing with numeric order of the represented values:
/// shorter digit string first, then lexicographic with B-1 fill.
inline int compare(const StructuredGamma& a, const StructuredGamma& b) {
    if (a.base != b.base) throw std::invalid_argument("compare: base mismatch");
    const uint32_t fill = a.base.value() - 1;
    int len = cmp(a.total_length(), b.total_length());
    if (len != 0) return len < 0 ? -1 : 1;
    size_t n = std::max(a.prefix.digits.size(), b.prefix.digits.size());
    for (size_t i = 0; i < n; ++i) {
        uint32_t da = i < a.prefix.digits.size() ? a.prefix.digits[i] : fill;
        uint32_t db = i < b.prefix.digits.size() ? b.prefix.digits[i] : fill;
        if (da != db) return da < db ? -1 : 1;
    }
    return 0;
}

/// U_B = floor(3B/2) - 3, the candidate-iteration upper bound.
inline unsigned u_bound(Base base) {
    if (base.value() < 3) throw std::invalid_argument("u_bound requires base >= 3");
    return 3 * base.value() / 2 - 3;
}

/// Smallest x with H_B(x) = target, as a structured form. Candidates
/// j = 0..min(U_B, t_0) trade j tail digits for the larger prefix sum
/// R_j = R_0 + j(B-1)^2; a perfect-square R_0 short-circuits to the
/// single-digit prefix.
inline StructuredGamma gamma_step(const BigNat& target, Base base) {
    if (target < 1) throw std::invalid_argument("gamma_step requires target >= 1");
    const unsigned B = base.value();
    if (B == 2) return StructuredGamma{base, PrefixDigits{base, {}}, target};
    const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
    const unsigned long r0 = mpz_fdiv_ui(target.get_mpz_t(), c);
    BigNat t0 = (target - r0) / c;

    // Perfect-square early return: single-digit prefix sqrt(R_0).
    unsigned long a = static_cast<unsigned long>(std::lround(std::sqrt(static_cast<double>(r0))));
    if (a * a == r0 && a <= B - 2) {
        PrefixDigits prefix{base, {}};
        if (a > 0) prefix.digits.push_back(static_cast<uint32_t>(a));
        return StructuredGamma{base, prefix, t0};
    }

    unsigned jmax = u_bound(base);
    if (t0 < static_cast<unsigned long>(jmax)) jmax = static_cast<unsigned>(t0.get_ui());
    std::optional<StructuredGamma> best;
    for (unsigned j = 0; j <= jmax; ++j) {
        StructuredGamma cand{base, min_prefix(r0 + static_cast<uint64_t>(j) * c, base),
                             t0 - j};
        if (!best || compare(cand, *best) < 0) best = std::move(cand);
    }
    return *best;
}

/// The iteration j at which the minimal candidate occurs for residue R_0,
/// with the tail treated as unbounded (J is a property of the residue only).
inline unsigned argmin_j(unsigned long r0, Base base) {
    const unsigned B = base.value();
    if (B < 3) throw std::invalid_argument("argmin_j requires base >= 3");
    const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
    if (r0 >= c) throw std::invalid_argument("argmin_j requires R_0 < (B-1)^2");

    unsigned long a = static_cast<unsigned long>(std::lround(std::sqrt(static_cast<double>(r0))));
    if (a * a == r0 && a <= B - 2) return 0;

    // Shared tail T large enough that every j <= U_B is admissible; only
    // length differences and prefixes matter in the comparison.
    const unsigned jmax = u_bound(base);
    const BigNat big_tail = 1000000;
    unsigned best_j = 0;
    std::optional<StructuredGamma> best;
    for (unsigned j = 0; j <= jmax; ++j) {
        StructuredGamma cand{base, min_prefix(r0 + static_cast<uint64_t>(j) * c, base),
                             big_tail - j};
        if (!best || compare(cand, *best) < 0) {
            best = std::move(cand);
            best_j = j;
        }
    }
    return best_j;
}

struct Table1Row {
    unsigned B;
    unsigned J;
    unsigned U;
};

/// J = max over residues R_0 in [0, (B-1)^2) of argmin_j, per base.
inline std::vector<Table1Row> table1(Base from, Base to) {
    if (from.value() < 3 || from.value() > to.value())
        throw std::invalid_argument("table1 requires 3 <= from <= to");
    std::vector<Table1Row> rows;
    for (unsigned B = from.value(); B <= to.value(); ++B) {
        const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
        unsigned J = 0;
        for (unsigned long r0 = 0; r0 < c; ++r0) J = std::max(J, argmin_j(r0, Base(B)));
        rows.push_back({B, J, u_bound(Base(B))});
    }
    return rows;
}

/// One link of a gamma chain. While the chain stays materializable the
/// exact tail count and value are carried; past the bit limit only the
/// prefix and the residue mod (B-1)^2 remain computable.
struct ChainStep {
    unsigned eta;                        // height of this entry
    PrefixDigits prefix;
    std::optional<BigNat> tail_count;    // exact t, while the target was exact
    std::optional<BigNat> value;         // materialized, while under bit_limit
    unsigned residue;                    // value mod (B-1)^2
};

struct ChainResult {
    unsigned eta_star;                   // height of the exact seed value
    BigNat seed;                         // gamma(eta_star)
    std::vector<ChainStep> steps;        // step k is gamma(eta_star + 1 + k)
    std::optional<std::string> stop_reason;

    /// The whole chain as a tower anchored at the seed.
    TowerGamma tower(Base base) const {
        TowerGamma tg{base, eta_star, seed, {}};
        for (const ChainStep& s : steps) tg.levels.push_back(s.prefix);
        return tg;
    }
};

/// Extends a brute-force table past its end: exact gamma_step targets while
/// values materialize under bit_limit, then symbolic steps driven by
/// residue_class of the accumulated tower.
inline ChainResult gamma_chain(const GammaTable& seed, Base base, unsigned extra_steps,
                               size_t bit_limit = (1u << 24)) {
    if (seed.base != base) throw std::invalid_argument("gamma_chain: base mismatch");
    const unsigned B = base.value();
    const unsigned long c = static_cast<unsigned long>(B - 1) * (B - 1);
    unsigned anchor = eta_star(seed);
    ChainResult result{anchor, seed.entries.at(anchor), {}, std::nullopt};

    TowerGamma tower{base, anchor, result.seed, {}};
    std::optional<BigNat> exact = result.seed;
    for (unsigned k = 0; k < extra_steps; ++k) {
        ChainStep step{anchor + 1 + k, PrefixDigits{base, {}}, std::nullopt, std::nullopt, 0};
        if (exact) {
            StructuredGamma sg = gamma_step(*exact, base);
            step.prefix = sg.prefix;
            step.tail_count = sg.tail_count;
            step.value = sg.materialize(bit_limit);
            exact = step.value;
        } else {
            unsigned r0;
            try {
                r0 = residue_class(tower);
            } catch (const CannotEvaluate& e) {
                result.stop_reason = e.what();
                return result;
            }
            if (B == 2) {
                step.prefix = PrefixDigits{base, {}};
            } else {
                unsigned long a = static_cast<unsigned long>(
                    std::lround(std::sqrt(static_cast<double>(r0))));
                if (a * a == r0 && a <= B - 2) {
                    if (a > 0) step.prefix.digits.push_back(static_cast<uint32_t>(a));
                } else {
                    unsigned j = argmin_j(r0, base);
                    step.prefix = min_prefix(r0 + static_cast<uint64_t>(j) * c, base);
                }
            }
        }
        tower.levels.push_back(step.prefix);
        if (step.value) {
            step.residue = static_cast<unsigned>(mpz_fdiv_ui(step.value->get_mpz_t(), c));
        } else {
            try {
                step.residue = residue_class(tower);
            } catch (const CannotEvaluate& e) {
                result.stop_reason = e.what();
                result.steps.push_back(std::move(step));
                return result;
            }
        }
        result.steps.push_back(std::move(step));
    }
    return result;
}

}  // namespace shn

#endif  // SHN_GAMMA_ENGINE_HPP
