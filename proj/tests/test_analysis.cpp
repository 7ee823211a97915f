#include <doctest.h>

#include <cmath>

#include "vftanh/analysis.hpp"
#include "vftanh/error.hpp"

using namespace vftanh;

TEST_SUITE("analysis") {

TEST_CASE("clamp thresholds") {
    CHECK(clamp_threshold(7) == doctest::Approx(2.7706318).epsilon(1e-7));
    CHECK(clamp_threshold_coarse(7) == doctest::Approx(2.4220935).epsilon(1e-7));
    CHECK(clamp_threshold(11) == doctest::Approx(4.1587611).epsilon(1e-7));
    CHECK(clamp_threshold_coarse(11) == doctest::Approx(3.8120652).epsilon(1e-7));
    CHECK(clamp_threshold(15) == doctest::Approx(5.5451698).epsilon(1e-7));
    CHECK(clamp_threshold_coarse(15) == doctest::Approx(5.1985886).epsilon(1e-7));
    for (int b = 2; b <= 30; ++b) {
        CHECK(clamp_threshold(b) == doctest::Approx(0.5 * std::log(std::ldexp(1.0, b + 1) - 1)).epsilon(1e-12));
        CHECK(std::tanh(clamp_threshold(b)) == doctest::Approx(1.0 - std::ldexp(1.0, -b)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(clamp_threshold(0), ConfigError);
}

TEST_CASE("clamp code of the reference configuration") {
    const TanhConfig cfg = TanhConfig::reference();
    CHECK(cfg.clamp_code() == static_cast<std::int64_t>(std::ceil(5.5451698 * 4096)));
}

TEST_CASE("sweep of the exactly rounded function has half-ulp error") {
    // |x| < 2 keeps tanh clear of the output saturation
    const QFormat in = signed_fmt(1, 10);
    const QFormat out = signed_fmt(0, 11);
    const auto r = sweep_codes("exact", in, out, [&](Fx x) {
        return quantize(std::tanh(to_real(x)), out, RoundMode::nearest_even);
    });
    CHECK(r.samples == 4096);
    CHECK(r.max_code_error == 0);
    CHECK(r.max_error_ulps <= 0.5 + 1e-9);
    CHECK(r.mean_abs_error <= r.max_abs_error);
}

TEST_CASE("sweep results do not depend on the worker count") {
    TanhConfig cfg = TanhConfig::reference();
    const auto one = exhaustive_sweep(cfg, 1);
    for (int jobs : {2, 3, 8}) {
        const auto many = exhaustive_sweep(cfg, jobs);
        CHECK(many.max_abs_error == one.max_abs_error);
        CHECK(many.mean_abs_error == one.mean_abs_error);
        CHECK(many.worst_input == one.worst_input);
        CHECK(many.max_code_error == one.max_code_error);
        CHECK(format_csv({many}) == format_csv({one}));
    }
    CHECK(one.samples == 65536);
}

TEST_CASE("sweep rejects inputs wider than the limit") {
    TanhConfig cfg = TanhConfig::reference();
    cfg.input_fmt = signed_fmt(4, 20);
    CHECK_THROWS_AS(exhaustive_sweep(cfg), ConfigError);
    CHECK_THROWS_AS(sweep_codes("wide", signed_fmt(4, 20), signed_fmt(0, 15), [](Fx x) { return x; }),
                    ConfigError);
}

TEST_CASE("more LUT precision never makes the sweep worse") {
    TanhConfig cfg = TanhConfig::reference();
    cfg.nr_stages = 0;
    double prev = 1.0;
    for (int bits : {10, 12, 14, 16, 18, 20}) {
        cfg.lut_fmt = unsigned_fmt(0, bits);
        cfg.mult_fmt = unsigned_fmt(0, bits);
        const double e = exhaustive_sweep(cfg, 4).max_abs_error;
        CAPTURE(bits);
        CHECK(e <= prev * 1.05);
        prev = e;
    }
}

TEST_CASE("table2 row order and lookup") {
    const auto rows = table2(TanhConfig::small());
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].nr_stages == 0);
    CHECK(rows[0].subtractor == Subtractor::ones);
    CHECK(rows[5].nr_stages == 3);
    CHECK(rows[5].subtractor == Subtractor::twos);
    CHECK(&find_row(rows, 2, Subtractor::twos) == &rows[3]);
    CHECK_THROWS_AS(find_row(rows, 4, Subtractor::twos), ConfigError);
}

TEST_CASE("code_hex and report formatting") {
    CHECK(code_hex({-32768, signed_fmt(3, 12)}) == "0x8000");
    CHECK(code_hex({-1, signed_fmt(0, 15)}) == "0xffff");
    CHECK(code_hex({5, unsigned_fmt(0, 18)}) == "0x00005");

    ErrorReport r;
    r.config = "demo";
    r.max_abs_error = 1.5e-5;
    r.mean_abs_error = 2.5e-6;
    r.max_error_ulps = 0.5;
    r.worst_input = {4096, signed_fmt(3, 12)};
    r.samples = 65536;
    CHECK(format_csv({r}) ==
          "config,max_abs_error,mean_abs_error,max_error_ulps,worst_input_hex,samples\n"
          "demo,1.500000000e-05,2.500000000e-06,0.500000,0x1000,65536\n");
    const std::string text = format_text({r});
    CHECK(text.find("demo") != std::string::npos);
    CHECK(text.find("0x1000") != std::string::npos);
}

TEST_CASE("method comparison orders the baselines as expected") {
    const TanhConfig cfg = TanhConfig::reference();
    const auto c = compare_methods(cfg, PwlTable::uniform(0.25, clamp_threshold(15)), 3, 4);
    CHECK(c.optimized.max_abs_error < c.pwl.max_abs_error);
    CHECK(c.pwl.max_abs_error < c.taylor.max_abs_error);
    CHECK(c.rows().size() == 4);
    CHECK_THROWS_AS(compare_methods(cfg, PwlTable::uniform(0.25, 4.0), 9), ConfigError);
}

}  // TEST_SUITE
