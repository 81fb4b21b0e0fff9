#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "picoforge/fixnum.hpp"
#include "tex_oracle.hpp"

using namespace picoforge;

TEST_CASE("parse_number accepts plain decimals") {
    auto n = parse_number("1.4");
    REQUIRE(n);
    CHECK(n->sign == 1);
    CHECK(n->int_part == 1);
    CHECK(n->frac == "4");
}

TEST_CASE("parse_number accepts sign with empty integer part") {
    auto n = parse_number("-.5");
    REQUIRE(n);
    CHECK(n->sign == -1);
    CHECK(n->int_part == 0);
    CHECK(n->frac == "5");
}

TEST_CASE("parse_number rejects malformed input") {
    CHECK_FALSE(parse_number("1.2.3"));
    CHECK_FALSE(parse_number("1x"));
    CHECK_FALSE(parse_number("+5"));
    CHECK_FALSE(parse_number("1-2"));
    CHECK_FALSE(parse_number("--1"));
    CHECK_FALSE(parse_number(""));
    CHECK_FALSE(parse_number("3000000000"));
    CHECK_FALSE(parse_number("0.1234567890"));
}

TEST_CASE("parse_number then canonical re-format is idempotent") {
    const char* inputs[] = {"1.4", "-.5", "5", "5.", "0", "-0", "007.25", "12.000"};
    for (const char* s : inputs) {
        auto n = parse_number(s);
        REQUIRE(n);
        std::string c = n->format();
        auto n2 = parse_number(c);
        REQUIRE(n2);
        CHECK(n2->format() == c);
        CHECK(n2->sign == n->sign);
        CHECK(n2->int_part == n->int_part);
        CHECK(n2->frac == n->frac);
    }
}

TEST_CASE("format_sp worked values") {
    CHECK(format_sp(327680) == "5.0");
    CHECK(format_sp(21845) == "0.33333");
    CHECK(format_sp(0) == "0.0");
    CHECK(format_sp(-32768) == "-0.5");
    CHECK(format_sp(65536) == "1.0");
}

TEST_CASE("format_sp matches the independent dimension printer") {
    for (long long v = -131072; v <= 131072; ++v)
        REQUIRE(format_sp(v) == tex_oracle::print_dimen(v));
    std::mt19937_64 rng(20260810);
    std::uniform_int_distribution<long long> dist(-kMaxDimen, kMaxDimen);
    for (int i = 0; i < 1000000; ++i) {
        long long v = dist(rng);
        if (format_sp(v) != tex_oracle::print_dimen(v)) {
            INFO(v);
            REQUIRE(format_sp(v) == tex_oracle::print_dimen(v));
        }
    }
}

TEST_CASE("parse_length with bare numbers uses the default unit") {
    CHECK(parse_length("2", kCm) == 3729358);  // 2 * 1864679
    CHECK(parse_length("0", kCm) == 0);
    CHECK(parse_length("0", 65536) == 0);
    CHECK(parse_length("-1.5", kSpPerPt * 2) == -196608);
}

TEST_CASE("parse_length explicit units use exact TeX conversions") {
    CHECK(parse_length("5pt", kCm) == 327680);
    CHECK(parse_length("1cm", 0) == 1864679);
    CHECK(parse_length("2.5cm", 0) == 4661699);
    CHECK(parse_length("1in", 0) == 4736286);
    CHECK(parse_length("1bp", 0) == 65781);
    CHECK(parse_length("1mm", 0) == 186467);
    CHECK(parse_length("1pc", 0) == 786432);
    CHECK(parse_length("1dd", 0) == 70124);
    CHECK(parse_length("1cc", 0) == 841489);
    CHECK(parse_length("7sp", 0) == 7);
    CHECK(parse_length(".8pt", 0) == 52429);
    CHECK(parse_length(".4pt", 0) == 26214);
    CHECK(parse_length("-5pt", 0) == -327680);
    CHECK(parse_length("--5pt", 0) == 327680);
}

TEST_CASE("parse_length rejects malformed text") {
    CHECK_FALSE(parse_length("abc", kCm));
    CHECK_FALSE(parse_length("1.2.3", kCm));
    CHECK_FALSE(parse_length("2qq", kCm));
    CHECK_FALSE(parse_length("", kCm));
}

TEST_CASE("decimal scaling of a register matches TeX") {
    // 1.25 * 0.8pt is exactly 1pt.
    auto f = parse_number("1.25");
    REQUIRE(f);
    CHECK(decimal_times_sp(*f, 52429) == 65536);
    // and the generic case agrees with the oracle
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> dist(-4 * 65536, 4 * 65536);
    for (int i = 0; i < 20000; ++i) {
        long long v = dist(rng);
        std::string dec = format_sp(dist(rng));
        auto n = parse_number(dec);
        REQUIRE(n);
        CHECK(decimal_times_sp(*n, v) == tex_oracle::decimal_times(dec, v));
    }
}

TEST_CASE("sp_div worked case: 1pt over 3pt") {
    CHECK(sp_div(65536, 196608) == 21845);
}

TEST_CASE("sp_div trivial cases") {
    CHECK(sp_div(0, 12345) == 0);
    for (Sp a : {1LL, 17LL, 4096LL, 1048576LL, 16777216LL})
        CHECK(sp_div(a, a) == 65536);
    // near the guard ceiling the divisor-count truncation makes the macro
    // itself inexact; stay faithful to it
    CHECK(sp_div(67108862, 67108862) == 65539);
    bool div0 = false;
    CHECK(sp_div(5, 0, &div0) == 0);
    CHECK(div0);
}

TEST_CASE("sp_div matches the macro register simulation") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long long> dist(-(1LL << 24), 1LL << 24);
    int compared = 0;
    for (int i = 0; i < 100000; ++i) {
        long long a = dist(rng);
        long long b = dist(rng);
        if (b == 0) b = 1;
        bool defined = true;
        long long expect = tex_oracle::macro_divide(a, b, &defined);
        if (!defined) continue;  // the macro's own crash domain
        ++compared;
        REQUIRE(sp_div(a, b) == expect);
    }
    CHECK(compared > 99000);
}

TEST_CASE("sp_div truncation bound where the divisor count stays exact") {
    // With |a| <= 16383 all four guarded rounds multiply (16383*16^3 is
    // still under 67108863), the divisor count is never truncated, and the
    // only loss is the final floor: r*b/65536 lands within |b|/65536 + 16
    // sp of a. For larger |a| the macro's own divisor truncation exceeds
    // that bound.
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<long long> adist(-16383, 16383);
    std::uniform_int_distribution<long long> bdist(-(1LL << 26), 1LL << 26);
    for (int i = 0; i < 20000; ++i) {
        long long a = adist(rng);
        long long b = bdist(rng);
        if (b == 0) b = 1;
        bool div0 = false;
        long long r = sp_div(a, b, &div0);
        if (div0) continue;
        long long lhs = r * b - 65536 * a;
        if (lhs < 0) lhs = -lhs;
        long long bound = (b < 0 ? -b : b) + 16LL * 65536;
        REQUIRE(lhs <= bound);
    }
}

TEST_CASE("sp_pyth zero, sign symmetry, and swap behavior") {
    CHECK(sp_pyth(0, 0) == 0);
    std::mt19937_64 rng(44);
    std::uniform_int_distribution<long long> dist(-(1LL << 24), 1LL << 24);
    for (int i = 0; i < 5000; ++i) {
        long long a = dist(rng), b = dist(rng);
        Sp p = sp_pyth(a, b);
        // absolute values are taken up front, exactly
        CHECK(p == sp_pyth(-a, b));
        CHECK(p == sp_pyth(a, -b));
        CHECK(p == sp_pyth(std::llabs(a), std::llabs(b)));
        // swapping operands changes which side feeds the seeded division,
        // so the engine itself is only near-symmetric
        double h = std::hypot(static_cast<double>(a), static_cast<double>(b));
        CHECK(std::abs(p - sp_pyth(b, a)) <= 2.0 * std::max(700.0, 0.0175 * h));
    }
}

TEST_CASE("sp_pyth worked case: 3pt, 4pt within 0.01pt of 5pt") {
    Sp p = sp_pyth(3 * 65536, 4 * 65536);
    CHECK(p == 327702);  // pinned by the step simulation
    CHECK(std::llabs(p - 5 * 65536) <= 655);
}

TEST_CASE("sp_pyth diagonal within 0.2 percent") {
    for (Sp a : {65536LL, 10 * 65536LL, 100 * 65536LL}) {
        double expect = std::hypot(static_cast<double>(a), static_cast<double>(a));
        Sp p = sp_pyth(a, a);
        CHECK(std::abs(p - expect) <= 0.002 * expect);
    }
}

TEST_CASE("sp_pyth matches the macro register simulation") {
    std::mt19937_64 rng(45);
    std::uniform_int_distribution<long long> dist(-(1LL << 24), 1LL << 24);
    for (int i = 0; i < 100000; ++i) {
        long long a = dist(rng);
        long long b = dist(rng);
        REQUIRE(sp_pyth(a, b) == tex_oracle::macro_pyth(a, b));
    }
}

TEST_CASE("sp_pyth tracks double hypot within the engine's envelope") {
    // The guarded division truncates its divisor count, so the engine's
    // worst relative error is ~1.15% at unfavorable operand ratios at any
    // scale. Assert the structural envelope here; the documented accurate
    // regimes are pinned separately above.
    std::mt19937_64 rng(46);
    std::uniform_int_distribution<long long> dist(-(1LL << 24), 1LL << 24);
    for (int i = 0; i < 20000; ++i) {
        long long a = dist(rng), b = dist(rng);
        double h = std::hypot(static_cast<double>(a), static_cast<double>(b));
        double err = std::abs(sp_pyth(a, b) - h);
        REQUIRE(err <= std::max(700.0, 0.0175 * h));
    }
}

TEST_CASE("unit registers default to 1cm and mirror unit into x and y") {
    UnitRegisters u;
    CHECK(u.unit == kCm);
    CHECK(u.xunit == kCm);
    CHECK(u.yunit == kCm);
    CHECK(u.runit() == kCm);
    u.set_unit(65536);
    CHECK(u.xunit == 65536);
    CHECK(u.yunit == 65536);
    u.set_runit(2 * 65536);
    CHECK(u.unit == 2 * 65536);
    CHECK(u.xunit == 65536);  // runit aliases unit only
}
