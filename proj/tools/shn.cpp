// Command-line front end for the smallest-happy-number library.
#include "shn/gamma_engine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;  // not happy / not found
constexpr int kExitUsage = 2;

struct Options {
    unsigned base = 10;
    std::string format = "text";
    std::string scan_limit = "10000000";
    size_t bit_limit = 1u << 24;
    std::string cache_path;
    bool no_header = false;
};

void print_header(const Options& opt, const std::string& cmd) {
    if (opt.no_header || opt.format != "text") return;
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::cout << "# shn " << cmd << " | " << buf << "\n";
}

BigNat parse_nat(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("expected a decimal natural number, got '" + s + "'");
    return BigNat(s);
}

/// Digit tuple with base subscript, e.g. (11, 16)_18.
std::string tuple_str(const DigitVec& d) {
    std::string s = "(";
    for (size_t i = 0; i < d.digits.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(d.digits[i]);
    }
    s += ")_" + std::to_string(d.base.value());
    return s;
}

/// Structured shorthand (A+1)·B^t - 1, e.g. 2·3^797161 - 1.
std::string shorthand(const PrefixDigits& prefix, const BigNat& t, Base base) {
    BigNat lead = prefix.value() + 1;
    return lead.get_str() + "·" + std::to_string(base.value()) + "^" + t.get_str() + " - 1";
}

fs::path cache_dir(const Options& opt) {
    if (const char* env = std::getenv("SHN_CACHE")) return fs::path(env);
    if (!opt.cache_path.empty()) return fs::path(opt.cache_path);
    return fs::path(".shn-cache");
}

constexpr unsigned kCacheMaxHeight = 128;

/// Brute-force table, reading/writing the per-base JSON cache. A cached run
/// with a scan limit at least as large serves any smaller request.
GammaTable cached_brute(Base base, const BigNat& scan_limit, const Options& opt) {
    fs::path dir = cache_dir(opt);
    fs::path file = dir / ("gamma_b" + std::to_string(base.value()) + ".json");
    if (fs::exists(file)) {
        try {
            std::ifstream in(file);
            GammaTable cached = table_from_json(json::parse(in));
            if (cached.base == base && cached.scan_limit >= scan_limit) {
                GammaTable narrowed{base, scan_limit, {}};
                for (const auto& [eta, v] : cached.entries)
                    if (v <= scan_limit) narrowed.entries.emplace(eta, v);
                return narrowed;
            }
        } catch (const std::exception&) {
            // unreadable cache: fall through and recompute
        }
    }
    GammaTable table = gamma_brute(base, kCacheMaxHeight, scan_limit);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
        std::ofstream out(file);
        out << table_to_json(table).dump(2) << "\n";
    }
    return table;
}

int cmd_height(const Options& opt, const std::string& xs, bool happy_only) {
    BigNat x = parse_nat(xs);
    if (x == 0) throw std::invalid_argument("x must be >= 1");
    Base base(opt.base);
    print_header(opt, happy_only ? "happy" : "height");
    std::vector<BigNat> traj = trajectory(x, base);
    bool happy = traj.back() == 1;
    if (opt.format == "json") {
        json j{{"x", x.get_str()}, {"base", base.value()}, {"happy", happy}};
        if (happy && !happy_only) j["height"] = traj.size() - 1;
        std::cout << j.dump() << "\n";
        return happy ? kExitOk : kExitNegative;
    }
    if (happy_only) {
        std::cout << (happy ? "happy" : "not happy") << "\n";
        return happy ? kExitOk : kExitNegative;
    }
    if (happy) {
        std::cout << "height=" << traj.size() - 1 << "\n";
        return kExitOk;
    }
    // Cycle portion: from the first occurrence of the repeated value.
    size_t start = 0;
    while (traj[start] != traj.back()) ++start;
    std::cout << "not happy; cycle:";
    for (size_t i = start; i + 1 < traj.size(); ++i) std::cout << " " << traj[i].get_str();
    std::cout << "\n";
    return kExitNegative;
}

void print_table(const GammaTable& table, unsigned max_height, const Options& opt) {
    if (opt.format == "json") {
        GammaTable shown{table.base, table.scan_limit, {}};
        for (const auto& [eta, v] : table.entries)
            if (eta <= max_height) shown.entries.emplace(eta, v);
        std::cout << table_to_json(shown).dump(2) << "\n";
        return;
    }
    if (opt.format == "csv") std::cout << "eta,gamma\n";
    for (const auto& [eta, v] : table.entries) {
        if (eta > max_height) continue;
        if (opt.format == "csv")
            std::cout << eta << "," << v.get_str() << "\n";
        else
            std::cout << "eta=" << eta << " gamma=" << v.get_str() << " "
                      << tuple_str(to_digits(v, table.base)) << "\n";
    }
}

int cmd_gamma(const Options& opt, const std::string& mode, unsigned max_height,
              const std::string& target) {
    Base base(opt.base);
    BigNat scan_limit = parse_nat(opt.scan_limit);
    print_header(opt, "gamma --mode " + mode);

    if (mode == "brute") {
        print_table(cached_brute(base, scan_limit, opt), max_height, opt);
        return kExitOk;
    }

    if (mode == "step") {
        if (target.empty()) throw std::invalid_argument("--mode step requires --target");
        StructuredGamma sg = gamma_step(parse_nat(target), base);
        std::optional<BigNat> value = sg.materialize(opt.bit_limit);
        if (opt.format == "json") {
            json j{{"base", base.value()},
                   {"prefix", sg.prefix.digits},
                   {"tail_count", sg.tail_count.get_str()},
                   {"h", sg.h_of().get_str()}};
            if (value) j["value"] = value->get_str();
            std::cout << j.dump() << "\n";
        } else {
            std::cout << "gamma = " << shorthand(sg.prefix, sg.tail_count, base);
            if (value) std::cout << " = " << value->get_str();
            std::cout << "\n";
        }
        return kExitOk;
    }

    if (mode == "chain") {
        GammaTable seed = cached_brute(base, scan_limit, opt);
        unsigned anchor;
        try {
            anchor = eta_star(seed);
        } catch (const InsufficientData&) {
            std::cerr << "eta* unreachable; increase --scan-limit\n";
            return kExitNegative;
        }
        unsigned steps = max_height > anchor ? max_height - anchor : 0;
        ChainResult chain = gamma_chain(seed, base, steps, opt.bit_limit);
        json out = json::array();
        for (const auto& s : chain.steps) {
            if (opt.format == "json") {
                json j{{"eta", s.eta}, {"prefix", s.prefix.digits}, {"residue", s.residue}};
                if (s.tail_count) j["tail_count"] = s.tail_count->get_str();
                if (s.value) j["value"] = s.value->get_str();
                out.push_back(j);
            } else {
                std::cout << "eta=" << s.eta;
                if (s.tail_count)
                    std::cout << " gamma = " << shorthand(s.prefix, *s.tail_count, base);
                else
                    std::cout << " prefix=" << tuple_str(DigitVec{base, s.prefix.digits})
                              << " tail=(B-1 repeated, symbolic)";
                std::cout << " residue=" << s.residue;
                if (s.value) std::cout << " = " << s.value->get_str();
                std::cout << "\n";
            }
        }
        if (opt.format == "json") std::cout << out.dump(2) << "\n";
        if (chain.stop_reason) {
            std::cerr << "chain stopped: " << *chain.stop_reason << "\n";
            return kExitNegative;
        }
        return kExitOk;
    }

    if (mode == "closed-form") {
        if (base.value() != 2 && base.value() != 3)
            throw CLI::ValidationError("closed-form supports bases 2 and 3 only");
        const unsigned anchor = base.value() == 2 ? 1 : 2;
        std::vector<BigNat> small =
            base.value() == 2 ? std::vector<BigNat>{1} : std::vector<BigNat>{1, 3};
        json out = json::array();
        std::optional<BigNat> prev;
        for (unsigned eta = 0; eta <= max_height; ++eta) {
            std::optional<BigNat> value;
            TowerGamma tg{base, anchor, BigNat(0), {}};
            if (eta < anchor) {
                value = small[eta];
            } else {
                tg = base.value() == 2 ? closed_form_binary(eta) : closed_form_ternary(eta);
                value = materialize(tg, opt.bit_limit);
            }
            if (opt.format == "json") {
                json j{{"eta", eta}};
                if (value) j["value"] = value->get_str();
                if (eta >= anchor) j["tower"] = tower_to_json(tg);
                out.push_back(j);
            } else {
                std::cout << "eta=" << eta << " gamma = ";
                if (value)
                    std::cout << value->get_str();
                else if (prev && base.value() == 2)
                    std::cout << "2^" << prev->get_str() << " - 1";
                else if (prev && base.value() == 3)
                    std::cout << "2·3^" << BigNat((*prev - 1) / 4).get_str() << " - 1";
                else
                    std::cout << "(symbolic tower, " << tg.levels.size() << " levels)";
                std::cout << "\n";
            }
            prev = value;
        }
        if (opt.format == "json") std::cout << out.dump(2) << "\n";
        return kExitOk;
    }

    throw CLI::ValidationError("unknown --mode '" + mode + "'");
}

int cmd_table1(const Options& opt, unsigned from, unsigned to) {
    print_header(opt, "table1");
    std::vector<Table1Row> rows = table1(Base(from), Base(to));
    if (opt.format == "json") {
        json out = json::array();
        for (const auto& r : rows) out.push_back({{"B", r.B}, {"J", r.J}, {"U_B", r.U}});
        std::cout << out.dump(2) << "\n";
    } else {
        if (opt.format == "csv") std::cout << "B,J,U_B\n";
        for (const auto& r : rows)
            if (opt.format == "csv")
                std::cout << r.B << "," << r.J << "," << r.U << "\n";
            else
                std::cout << "B=" << r.B << " J=" << r.J << " U_B=" << r.U << "\n";
    }
    return kExitOk;
}

int cmd_eta_star(const Options& opt) {
    Base base(opt.base);
    BigNat scan_limit = parse_nat(opt.scan_limit);
    print_header(opt, "eta-star");
    GammaTable table = cached_brute(base, scan_limit, opt);
    const BigNat b1 = base.value() - 1;
    BigNat threshold = 2 * b1 * b1 * b1 + 5;
    unsigned es;
    try {
        es = eta_star(table);
    } catch (const InsufficientData&) {
        std::cerr << "threshold " << threshold.get_str()
                  << " not exceeded within scan limit; increase --scan-limit\n";
        return kExitNegative;
    }
    if (opt.format == "json") {
        std::cout << json{{"base", base.value()},
                          {"eta_star", es},
                          {"threshold", threshold.get_str()},
                          {"gamma", table.entries.at(es).get_str()}}
                         .dump()
                  << "\n";
    } else {
        std::cout << "eta_star=" << es << " threshold=" << threshold.get_str()
                  << " gamma=" << table.entries.at(es).get_str() << "\n";
    }
    return kExitOk;
}

int cmd_mersenne(const Options& opt, unsigned max_height) {
    print_header(opt, "mersenne");
    auto status_str = [](MersenneStatus s) {
        switch (s) {
            case MersenneStatus::Prime: return "prime";
            case MersenneStatus::Composite: return "composite";
            default: return "unknown";
        }
    };
    json out = json::array();
    for (const MersenneEntry& e : mersenne_report(max_height)) {
        if (opt.format == "json") {
            json j{{"eta", e.eta}, {"status", status_str(e.status)}};
            if (e.exponent) j["exponent"] = e.exponent->get_str();
            out.push_back(j);
        } else {
            std::cout << "eta=" << e.eta;
            if (e.exponent) std::cout << " exponent=" << e.exponent->get_str();
            std::cout << " status=" << status_str(e.status) << "\n";
        }
    }
    if (opt.format == "json") std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_tower_mod(const Options& opt, const std::string& file, const std::string& mod) {
    print_header(opt, "tower-mod");
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open '" + file + "'");
    TowerGamma tg = tower_from_json(json::parse(in));
    BigNat m = parse_nat(mod);
    BigNat r;
    try {
        r = eval_mod(tg, m, opt.bit_limit);
    } catch (const CannotEvaluate& e) {
        std::cerr << "cannot evaluate: " << e.what() << "\n";
        return kExitNegative;
    }
    if (opt.format == "json")
        std::cout << json{{"mod", m.get_str()}, {"residue", r.get_str()}}.dump() << "\n";
    else
        std::cout << "residue=" << r.get_str() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smallest happy numbers of any height, any base"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--scan-limit", opt.scan_limit, "brute-force scan bound (decimal)");
    app.add_option("--bit-limit", opt.bit_limit, "materialization bound in bits");
    app.add_option("--cache-path", opt.cache_path, "cache directory (SHN_CACHE overrides)");
    app.add_flag("--no-header", opt.no_header, "suppress the timestamp header line");

    std::string xs, mode = "brute", target, tower_file, mod;
    unsigned max_height = 7, from = 3, to = 24;

    CLI::App* height = app.add_subcommand("height", "height of x, or its cycle");
    height->add_option("x", xs)->required();
    height->add_option("--base", opt.base)->check(CLI::Range(2u, 1000000u));

    CLI::App* happy = app.add_subcommand("happy", "is x happy?");
    happy->add_option("x", xs)->required();
    happy->add_option("--base", opt.base)->check(CLI::Range(2u, 1000000u));

    CLI::App* gamma = app.add_subcommand("gamma", "smallest happy numbers per height");
    gamma->add_option("--base", opt.base)->check(CLI::Range(2u, 1000000u));
    gamma->add_option("--mode", mode)->check(CLI::IsMember({"brute", "step", "chain", "closed-form"}));
    gamma->add_option("--max-height", max_height);
    gamma->add_option("--target", target, "H target for --mode step (decimal)");

    CLI::App* t1 = app.add_subcommand("table1", "max useful iteration J vs bound U_B");
    t1->add_option("--from", from)->check(CLI::Range(3u, 10000u));
    t1->add_option("--to", to)->check(CLI::Range(3u, 10000u));

    CLI::App* es = app.add_subcommand("eta-star", "threshold height of the recursion");
    es->add_option("--base", opt.base)->check(CLI::Range(2u, 1000000u));

    CLI::App* mers = app.add_subcommand("mersenne", "Mersenne status of binary gammas");
    mers->add_option("--max-height", max_height);

    CLI::App* tm = app.add_subcommand("tower-mod", "evaluate a tower file modulo m");
    tm->add_option("--file", tower_file)->required();
    tm->add_option("--mod", mod)->required();

    for (CLI::App* sub : {height, happy, gamma, t1, es, mers, tm}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (height->parsed()) return cmd_height(opt, xs, false);
        if (happy->parsed()) return cmd_height(opt, xs, true);
        if (gamma->parsed()) return cmd_gamma(opt, mode, max_height, target);
        if (t1->parsed()) return cmd_table1(opt, from, to);
        if (es->parsed()) return cmd_eta_star(opt);
        if (mers->parsed()) return cmd_mersenne(opt, max_height);
        if (tm->parsed()) return cmd_tower_mod(opt, tower_file, mod);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
