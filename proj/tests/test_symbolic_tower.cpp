#include "shn/symbolic_tower.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace shn;

TEST_CASE("closed forms reproduce the small sequences") {
    CHECK(*materialize(closed_form_binary(1)) == 2);
    CHECK(*materialize(closed_form_binary(2)) == 3);
    CHECK(*materialize(closed_form_binary(3)) == 7);
    CHECK(*materialize(closed_form_binary(4)) == 127);
    BigNat m127;
    mpz_ui_pow_ui(m127.get_mpz_t(), 2, 127);
    CHECK(*materialize(closed_form_binary(5)) == m127 - 1);
    CHECK_THROWS_AS(closed_form_binary(0), std::invalid_argument);

    CHECK(*materialize(closed_form_ternary(2)) == 13);
    CHECK(*materialize(closed_form_ternary(3)) == 53);
    CHECK(*materialize(closed_form_ternary(4)) == 3188645);
    CHECK_THROWS_AS(closed_form_ternary(1), std::invalid_argument);
}

TEST_CASE("level prefixes have the closed-form shape") {
    TowerGamma b = closed_form_binary(25);
    CHECK(b.levels.size() == 24);
    for (const auto& level : b.levels) CHECK(level.digits.empty());
    TowerGamma t = closed_form_ternary(25);
    CHECK(t.levels.size() == 23);
    for (const auto& level : t.levels) CHECK(level.digits == std::vector<uint32_t>{1});
}

TEST_CASE("one happy step descends the tower") {
    for (unsigned eta = 3; eta <= 5; ++eta) {
        BigNat upper = *materialize(closed_form_ternary(eta));
        BigNat lower = *materialize(closed_form_ternary(eta - 1));
        CHECK(happy_step(upper, Base(3)) == lower);
    }
    for (unsigned eta = 2; eta <= 5; ++eta) {
        BigNat upper = *materialize(closed_form_binary(eta));
        BigNat lower = *materialize(closed_form_binary(eta - 1));
        CHECK(happy_step(upper, Base(2)) == lower);
    }
}

TEST_CASE("eval_mod on constants and known residues") {
    TowerGamma constant{Base(3), 3, BigNat(53), {}};
    CHECK(eval_mod(constant, BigNat(10)) == 3);
    CHECK(eval_mod(constant, BigNat(1)) == 0);
    CHECK(eval_mod(closed_form_ternary(5), BigNat(4)) == 1);
    CHECK_THROWS_AS(eval_mod(constant, BigNat(0)), std::invalid_argument);

    BigNat too_big;
    mpz_ui_pow_ui(too_big.get_mpz_t(), 2, 70);
    CHECK_THROWS_AS(eval_mod(constant, too_big), std::invalid_argument);
}

TEST_CASE("eval_mod agrees with materialize-then-reduce on gamma_3(5)") {
    TowerGamma tg = closed_form_ternary(5);
    BigNat value = *materialize(tg);
    std::mt19937_64 rng(0xABCD);
    for (int i = 0; i < 100; ++i) {
        BigNat m = static_cast<unsigned long>(2 + rng() % 1000000);
        CHECK(eval_mod(tg, m) == value % m);
    }
}

TEST_CASE("eval_mod agrees on random synthetic towers") {
    std::mt19937_64 rng(0x7077E4);
    for (int t = 0; t < 25; ++t) {
        TowerGamma tg = shn_test::random_tower(rng, 1u << 20);
        auto value = materialize(tg, 1u << 20);
        REQUIRE(value.has_value());
        for (int i = 0; i < 40; ++i) {
            BigNat m = static_cast<unsigned long>(2 + rng() % 1000000);
            CAPTURE(tg.base.value(), tg.seed.get_str(), tg.levels.size(), m.get_str());
            CHECK(eval_mod(tg, m) == *value % m);
        }
    }
}

TEST_CASE("residue classes") {
    CHECK(residue_class(closed_form_ternary(4)) == 1);
    CHECK(residue_class(closed_form_binary(17)) == 0);  // (B-1)^2 = 1
    for (unsigned eta = 3; eta <= 20; ++eta) CHECK(residue_class(closed_form_ternary(eta)) == 1);
}

TEST_CASE("guard refuses rather than guessing") {
    // A tower whose seed is tiny and whose exponents stay tiny cannot
    // justify the generalized-Euler rewrite once the exact path is denied.
    TowerGamma tg{Base(3), 0, BigNat(13),
                  {PrefixDigits{Base(3), {1}}, PrefixDigits{Base(3), {1}}}};
    CHECK_THROWS_AS(eval_mod(tg, BigNat(1000), 1), CannotEvaluate);
    // with the normal exact path the same tower evaluates fine
    CHECK(eval_mod(tg, BigNat(1000)) == 3188645 % 1000);
}

TEST_CASE("lucas_lehmer") {
    CHECK(lucas_lehmer(2));
    CHECK(lucas_lehmer(3));
    CHECK(lucas_lehmer(7));
    CHECK_FALSE(lucas_lehmer(11));  // 2047 = 23 * 89
    CHECK(lucas_lehmer(127));
    CHECK_THROWS_AS(lucas_lehmer(9), std::domain_error);
    CHECK_THROWS_AS(lucas_lehmer(1), std::domain_error);
}

TEST_CASE("mersenne report") {
    auto report = mersenne_report(6);
    REQUIRE(report.size() == 5);
    for (const auto& e : report) {
        if (e.eta <= 5) CHECK(e.status == MersenneStatus::Prime);
        if (e.eta == 6) CHECK(e.status == MersenneStatus::Unknown);
    }
    CHECK(report[0].eta == 2);
    CHECK(*report[0].exponent == 2);
    CHECK(*report[3].exponent == 127);

    auto tiny = mersenne_report(2);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0].status == MersenneStatus::Prime);
}

TEST_CASE("tower JSON round trip") {
    TowerGamma tg = closed_form_ternary(6);
    nlohmann::json j = tower_to_json(tg);
    CHECK(j.at("base") == 3);
    CHECK(j.at("anchor_height") == 2);
    CHECK(j.at("seed") == "13");
    CHECK(j.at("levels").size() == 4);
    TowerGamma back = tower_from_json(j);
    CHECK(back.base == tg.base);
    CHECK(back.anchor_height == tg.anchor_height);
    CHECK(back.seed == tg.seed);
    REQUIRE(back.levels.size() == tg.levels.size());
    for (size_t i = 0; i < back.levels.size(); ++i)
        CHECK(back.levels[i].digits == tg.levels[i].digits);
    CHECK(residue_class(back) == residue_class(tg));
}
