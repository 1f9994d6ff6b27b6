#ifndef SHN_ORACLE_HPP
#define SHN_ORACLE_HPP

#include "shn/core_arith.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace shn {

/// Raised when a brute-force table does not reach far enough to answer.
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact smallest happy numbers of one base: height -> gamma(height), for
/// every height whose minimum lies at or below scan_limit.
struct GammaTable {
    Base base;
    BigNat scan_limit;
    std::map<unsigned, BigNat> entries;
};

/// Memo of heights for machine-word values; -1 marks "not happy".
class HeightCache {
public:
    explicit HeightCache(Base base)
        : base_(base), small_(kSmallSize, kUnknown) {}

    Base base() const { return base_; }

    /// Height of x, or -1 when x never reaches 1.
    int32_t height_u64(uint64_t x) {
        path_.clear();
        int32_t h;
        for (;;) {
            if (x == 1) { h = 0; break; }
            if (x < kSmallSize && small_[x] != kUnknown) { h = small_[x]; break; }
            bool cycle = false;
            for (uint64_t p : path_)
                if (p == x) { cycle = true; break; }
            if (cycle) { h = kNotHappy; break; }
            path_.push_back(x);
            x = step_u64(x);
        }
        for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
            if (h >= 0) ++h;
            if (*it < kSmallSize) small_[*it] = h;
        }
        return h;
    }

    uint64_t step_u64(uint64_t x) const {
        const uint64_t B = base_.value();
        uint64_t s = 0;
        while (x != 0) {
            uint64_t d = x % B;
            s += d * d;
            x /= B;
        }
        return s;
    }

private:
    static constexpr int32_t kUnknown = -2;
    static constexpr int32_t kNotHappy = -1;
    static constexpr size_t kSmallSize = 1u << 16;

    Base base_;
    std::vector<int32_t> small_;
    std::vector<uint64_t> path_;
};

/// Exhaustive ascending scan. Heights whose smallest witness exceeds
/// scan_limit are simply absent from the result; no silent unbounded scan.
inline GammaTable gamma_brute(Base base, unsigned max_height, const BigNat& scan_limit) {
    if (scan_limit < base.value()) throw std::invalid_argument("scan_limit < base");
    if (!scan_limit.fits_ulong_p()) throw std::invalid_argument("scan_limit too large for the scanner");
    const uint64_t limit = scan_limit.get_ui();
    GammaTable table{base, scan_limit, {}};
    HeightCache cache(base);
    unsigned found = 0;
    for (uint64_t x = 1; x <= limit; ++x) {
        int32_t h = cache.height_u64(x);
        if (h < 0 || static_cast<unsigned>(h) > max_height) continue;
        auto [it, inserted] = table.entries.emplace(static_cast<unsigned>(h), BigNat());
        if (inserted) {
            it->second = static_cast<unsigned long>(x);
            if (++found == max_height + 1) break;
        }
    }
    return table;
}

/// Smallest height whose entry exceeds 2(B-1)^3 + 5. Requires the table to
/// hold consecutive heights from 0 up past the threshold.
inline unsigned eta_star(const GammaTable& table) {
    const BigNat b1 = table.base.value() - 1;
    const BigNat threshold = 2 * b1 * b1 * b1 + 5;
    for (unsigned eta = 0;; ++eta) {
        auto it = table.entries.find(eta);
        if (it == table.entries.end())
            throw InsufficientData("gamma table ends before exceeding 2(B-1)^3+5");
        if (it->second > threshold) return eta;
    }
}

struct RecursionCheck {
    unsigned eta;          // the pair (eta, eta+1)
    BigNat step_of_next;   // H_B(gamma(eta+1))
    BigNat gamma_eta;
    bool equal;            // step_of_next == gamma(eta)
    bool at_least;         // step_of_next >= gamma(eta)
};

struct RecursionReport {
    std::optional<unsigned> eta_star;     // absent if the table never crosses the threshold
    std::vector<RecursionCheck> checks;   // one per consecutive pair in the table
    bool all_equal_from_eta_star;         // vacuously true when eta_star is absent
    bool all_at_least;
};

/// Checks H_B(gamma(eta+1)) = gamma(eta) for eta >= eta*, and the weaker
/// >= relation on every consecutive pair.
inline RecursionReport verify_recursion(const GammaTable& table) {
    RecursionReport report{std::nullopt, {}, true, true};
    try {
        report.eta_star = eta_star(table);
    } catch (const InsufficientData&) {
    }
    for (const auto& [eta, value] : table.entries) {
        auto next = table.entries.find(eta + 1);
        if (next == table.entries.end()) continue;
        BigNat h = happy_step(next->second, table.base);
        RecursionCheck c{eta, h, value, h == value, h >= value};
        if (report.eta_star && eta >= *report.eta_star && !c.equal)
            report.all_equal_from_eta_star = false;
        if (!c.at_least) report.all_at_least = false;
        report.checks.push_back(std::move(c));
    }
    return report;
}

struct MonotonicityReport {
    // Pairs (eta, eta+1) with gamma(eta) >= gamma(eta+1) below the strict-
    // increase threshold; expected anomalies, not bugs.
    std::vector<std::pair<unsigned, unsigned>> anomalies;
    // Same above the threshold; any entry here is a bug.
    std::vector<std::pair<unsigned, unsigned>> violations;
};

/// Strict increase must hold whenever gamma(eta+1) > 2(B-1)^2 (B >= 3),
/// or gamma(eta+1) >= B^2 when B = 2.
inline MonotonicityReport verify_monotonicity(const GammaTable& table) {
    MonotonicityReport report;
    const unsigned B = table.base.value();
    const BigNat b1 = B - 1;
    const BigNat threshold = (B == 2) ? BigNat(B * B) : BigNat(2 * b1 * b1);
    for (const auto& [eta, value] : table.entries) {
        auto next = table.entries.find(eta + 1);
        if (next == table.entries.end()) continue;
        if (next->second > value) continue;
        bool above = (B == 2) ? (next->second >= threshold) : (next->second > threshold);
        (above ? report.violations : report.anomalies).emplace_back(eta, eta + 1);
    }
    return report;
}

// --- cache persistence ------------------------------------------------------

inline nlohmann::json table_to_json(const GammaTable& table) {
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [eta, value] : table.entries)
        entries[std::to_string(eta)] = value.get_str();
    return {{"base", table.base.value()},
            {"scan_limit", table.scan_limit.get_str()},
            {"entries", entries}};
}

inline GammaTable table_from_json(const nlohmann::json& j) {
    GammaTable table{Base(j.at("base").get<unsigned>()),
                     BigNat(j.at("scan_limit").get<std::string>()), {}};
    for (const auto& [key, value] : j.at("entries").items())
        table.entries.emplace(static_cast<unsigned>(std::stoul(key)),
                              BigNat(value.get<std::string>()));
    return table;
}

}  // namespace shn

#endif  // SHN_ORACLE_HPP
