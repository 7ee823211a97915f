#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vftanh/error.hpp"
#include "vftanh/fxnum.hpp"

using namespace vftanh;

namespace {
constexpr QFormat s3_12 = signed_fmt(3, 12);
constexpr QFormat s_15 = signed_fmt(0, 15);
constexpr QFormat u0_18 = unsigned_fmt(0, 18);
constexpr QFormat u1_16 = unsigned_fmt(1, 16);
}  // namespace

TEST_SUITE("fxnum") {

TEST_CASE("format ranges and names") {
    CHECK(s3_12.width() == 16);
    CHECK(s3_12.max_value() == doctest::Approx(8.0 - std::ldexp(1.0, -12)));
    CHECK(s3_12.min_value() == -8.0);
    CHECK(u0_18.min_value() == 0.0);
    CHECK(s3_12.to_string() == "s3.12");
    CHECK(s_15.to_string() == "s.15");
    CHECK(u0_18.to_string() == "u0.18");
    CHECK_THROWS_AS(require_valid(unsigned_fmt(0, 0)), ConfigError);
    CHECK_THROWS_AS(require_valid(signed_fmt(40, 40)), ConfigError);
    CHECK_THROWS_AS(Fx::from_code(32768, s_15), ConfigError);
    CHECK(Fx::from_code(-32768, s_15).value() == -1.0);
}

TEST_CASE("quantize examples") {
    CHECK(quantize(0.0, s3_12, RoundMode::nearest_even).code == 0);
    CHECK(quantize(1.0, s_15, RoundMode::nearest_even).code == 32767);
    CHECK(quantize(0.3, s3_12, RoundMode::truncate).code == 1228);
    CHECK(quantize(-100.0, s3_12, RoundMode::nearest_even).code == -32768);
    // ties go to even
    CHECK(quantize(2.5 / 4096, s3_12, RoundMode::nearest_even).code == 2);
    CHECK(quantize(3.5 / 4096, s3_12, RoundMode::nearest_even).code == 4);
    CHECK(quantize(-2.5 / 4096, s3_12, RoundMode::nearest_even).code == -2);
    // truncate is floor
    CHECK(quantize(-0.1 / 4096, s3_12, RoundMode::truncate).code == -1);
}

TEST_CASE("to_real examples") {
    CHECK(to_real({0, s3_12}) == 0.0);
    CHECK(to_real({4096, s3_12}) == 1.0);
    CHECK(to_real({-4096, s3_12}) == -1.0);
}

TEST_CASE("quantize/to_real round trip is exact on every s3.12 code") {
    for (std::int64_t c = s3_12.min_code(); c <= s3_12.max_code(); ++c) {
        const Fx v{c, s3_12};
        for (RoundMode m : {RoundMode::truncate, RoundMode::nearest_even}) {
            const Fx back = quantize(to_real(v), s3_12, m);
            if (back != v) FAIL("round trip broke at code " << c);
        }
    }
}

TEST_CASE("mul_fx examples") {
    const Fx one{1 << 16, u1_16};
    const Fx v{12345, u0_18};
    CHECK(mul_fx(one, v, u0_18, RoundMode::nearest_even) == v);
    CHECK(mul_fx({0, u0_18}, v, u0_18, RoundMode::truncate).code == 0);
    const Fx half{1 << 17, u0_18};
    CHECK(mul_fx(half, half, u0_18, RoundMode::nearest_even).code == 65536);
    // saturation
    CHECK(mul_fx(Fx{3 << 16, unsigned_fmt(2, 16)}, Fx{3 << 16, unsigned_fmt(2, 16)}, u1_16,
                 RoundMode::truncate)
              .code == u1_16.max_code());
}

TEST_CASE("mul_fx rounding error bounds (random operands)") {
    auto gen = oracle::rng(7);
    std::uniform_int_distribution<std::int64_t> code18(0, (1 << 18) - 1);
    std::uniform_int_distribution<std::int64_t> code16(-(1 << 16), (1 << 16) - 1);
    const QFormat s1_16 = signed_fmt(1, 16);
    for (int i = 0; i < 20000; ++i) {
        const Fx a{code18(gen), u0_18};
        const Fx b{code16(gen), s1_16};
        const long double exact = oracle::value(a.code, 18) * oracle::value(b.code, 16);
        const long double ulp = std::ldexp(1.0L, -16);
        const Fx rn = mul_fx(a, b, s1_16, RoundMode::nearest_even);
        const Fx tr = mul_fx(a, b, s1_16, RoundMode::truncate);
        REQUIRE(std::fabs(oracle::value(rn.code, 16) - exact) <= ulp / 2);
        const long double dt = exact - oracle::value(tr.code, 16);
        REQUIRE(dt >= 0.0L);
        REQUIRE(dt < ulp);
    }
}

TEST_CASE("mul_fx_shifted folds a power of two into the single rounding") {
    const Fx a{3, unsigned_fmt(0, 4)};  // 3/16
    const Fx b{5, unsigned_fmt(0, 4)};  // 5/16
    // 15/256 / 2 = 15/512 -> nearest in u0.8 is 8/256 (7.5 ties to even)
    CHECK(mul_fx_shifted(a, b, 1, unsigned_fmt(0, 8), RoundMode::nearest_even).code == 8);
    CHECK(mul_fx_shifted(a, b, 1, unsigned_fmt(0, 8), RoundMode::truncate).code == 7);
}

TEST_CASE("add and sub align to the finer operand") {
    const Fx a{1, unsigned_fmt(0, 2)};   // 0.25
    const Fx b{1, unsigned_fmt(0, 18)};  // 2^-18
    CHECK(add_fx(a, b, unsigned_fmt(0, 18), RoundMode::truncate).code == (1 << 16) + 1);
    CHECK(sub_fx(a, b, unsigned_fmt(0, 18), RoundMode::truncate).code == (1 << 16) - 1);
    CHECK(sub_fx(b, a, unsigned_fmt(0, 18), RoundMode::truncate).code == 0);  // saturates at 0
}

TEST_CASE("ones_complement_sub1 examples and errors") {
    CHECK(ones_complement_sub1({0, u0_18}).code == (1 << 18) - 1);
    CHECK(ones_complement_sub1({(1 << 18) - 1, u0_18}).code == 0);
    CHECK(to_real(ones_complement_sub1({1 << 17, u0_18})) == 0.5 - std::ldexp(1.0, -18));
    CHECK_THROWS_AS(ones_complement_sub1({0, s_15}), ConfigError);
    CHECK_THROWS_AS(ones_complement_sub1({0, u1_16}), ConfigError);
}

TEST_CASE("ones_complement_sub1 is exactly one ulp short of 1 - f (exhaustive u0.18)") {
    const double ulp = u0_18.ulp();
    for (std::int64_t c = 0; c <= u0_18.max_code(); ++c) {
        const Fx f{c, u0_18};
        const Fx expect = quantize(1.0 - to_real(f) - ulp, u0_18, RoundMode::truncate);
        if (ones_complement_sub1(f) != expect) FAIL("mismatch at code " << c);
    }
}

TEST_CASE("abs_split examples") {
    auto zero = abs_split({0, s3_12});
    CHECK_FALSE(zero.negative);
    CHECK(zero.magnitude.code == 0);
    CHECK(zero.magnitude.fmt == unsigned_fmt(3, 12));

    auto neg = abs_split(quantize(-1.5, s3_12, RoundMode::nearest_even));
    CHECK(neg.negative);
    CHECK(to_real(neg.magnitude) == 1.5);

    auto most_negative = abs_split({-32768, s3_12});
    CHECK(most_negative.negative);
    CHECK(to_real(most_negative.magnitude) == 8.0 - std::ldexp(1.0, -12));

    CHECK_THROWS_AS(abs_split({0, u0_18}), ConfigError);
}

TEST_CASE("abs_split then sign restore is the identity except at the most-negative code") {
    for (std::int64_t c = s3_12.min_code(); c <= s3_12.max_code(); ++c) {
        const auto sm = abs_split({c, s3_12});
        const Fx back = apply_sign(sm.negative, sm.magnitude, s3_12);
        const std::int64_t expect = c == s3_12.min_code() ? -s3_12.max_code() : c;
        if (back.code != expect) FAIL("code " << c);
    }
}

}  // TEST_SUITE
