#include "vftanh/fxnum.hpp"

#include <algorithm>
#include <cmath>

#include "vftanh/error.hpp"

namespace vftanh {

namespace {

using i128 = wide_int;

i128 saturate(i128 code, const QFormat& fmt) {
    if (code > fmt.max_code()) return fmt.max_code();
    if (code < fmt.min_code()) return fmt.min_code();
    return code;
}

int bit_length(i128 v) {
    if (v < 0) v = -v;
    int n = 0;
    while (v != 0) {
        v >>= 1;
        ++n;
    }
    return n;
}

// floor(code / 2^drop), then the mode's correction from the dropped bits.
i128 round_shift_right(i128 code, int drop, RoundMode mode) {
    if (drop <= 0) return code;
    if (drop >= 126) {
        // Everything is below half an ulp except the sign.
        return code < 0 ? -1 : 0;
    }
    const i128 q = code >> drop;  // arithmetic: floor for negatives
    if (mode == RoundMode::truncate) return q;
    const i128 rem = code - (q << drop);
    const i128 half = i128{1} << (drop - 1);
    if (rem > half || (rem == half && (q & 1) != 0)) return q + 1;
    return q;
}

}  // namespace

double QFormat::ulp() const { return std::ldexp(1.0, -frac_bits); }
double QFormat::max_value() const { return std::ldexp(static_cast<double>(max_code()), -frac_bits); }
double QFormat::min_value() const { return std::ldexp(static_cast<double>(min_code()), -frac_bits); }

std::string QFormat::to_string() const {
    std::string s = is_signed ? "s" : "u";
    if (!(is_signed && int_bits == 0)) s += std::to_string(int_bits);
    s += ".";
    s += std::to_string(frac_bits);
    return s;
}

void require_valid(const QFormat& fmt) {
    if (!fmt.valid()) {
        throw ConfigError("invalid fixed-point format " + fmt.to_string() + " (width must be 1.." +
                          std::to_string(QFormat::kMaxWidth) + ")");
    }
}

const char* to_string(RoundMode mode) {
    return mode == RoundMode::truncate ? "truncate" : "nearest";
}

Fx Fx::from_code(std::int64_t code, QFormat fmt) {
    require_valid(fmt);
    if (code < fmt.min_code() || code > fmt.max_code()) {
        throw ConfigError("code " + std::to_string(code) + " does not fit " + fmt.to_string());
    }
    return {code, fmt};
}

double Fx::value() const { return to_real(*this); }

double to_real(Fx v) { return std::ldexp(static_cast<double>(v.code), -v.fmt.frac_bits); }

Fx quantize(double x, QFormat fmt, RoundMode mode) {
    require_valid(fmt);
    if (std::isnan(x)) return {0, fmt};
    const double scaled = std::ldexp(x, fmt.frac_bits);
    const auto hi = static_cast<double>(fmt.max_code());
    const auto lo = static_cast<double>(fmt.min_code());
    if (scaled >= hi) return {fmt.max_code(), fmt};
    if (scaled <= lo) return {fmt.min_code(), fmt};

    double q = std::floor(scaled);
    if (mode == RoundMode::nearest_even) {
        const double diff = scaled - q;
        if (diff > 0.5 || (diff == 0.5 && std::fmod(q, 2.0) != 0.0)) q += 1.0;
    }
    return {static_cast<std::int64_t>(saturate(static_cast<i128>(q), fmt)), fmt};
}

std::int64_t rescale_code(i128 code, int from_frac, QFormat out, RoundMode mode) {
    const int shift = out.frac_bits - from_frac;
    if (shift >= 0) {
        if (code != 0 && bit_length(code) + shift > 125) {
            return code > 0 ? out.max_code() : out.min_code();
        }
        return static_cast<std::int64_t>(saturate(code << shift, out));
    }
    return static_cast<std::int64_t>(saturate(round_shift_right(code, -shift, mode), out));
}

Fx requantize(Fx v, QFormat out, RoundMode mode) {
    require_valid(out);
    return {rescale_code(v.code, v.fmt.frac_bits, out, mode), out};
}

Fx mul_fx(Fx a, Fx b, QFormat out, RoundMode mode) { return mul_fx_shifted(a, b, 0, out, mode); }

Fx mul_fx_shifted(Fx a, Fx b, int shift, QFormat out, RoundMode mode) {
    require_valid(out);
    const i128 product = static_cast<i128>(a.code) * static_cast<i128>(b.code);
    const int product_frac = a.fmt.frac_bits + b.fmt.frac_bits + shift;
    if (product_frac < 0) {
        return {rescale_code(product << -product_frac, 0, out, mode), out};
    }
    return {rescale_code(product, product_frac, out, mode), out};
}

namespace {

Fx add_aligned(Fx a, Fx b, bool subtract, QFormat out, RoundMode mode) {
    require_valid(out);
    const int frac = std::max(a.fmt.frac_bits, b.fmt.frac_bits);
    const i128 ca = static_cast<i128>(a.code) << (frac - a.fmt.frac_bits);
    const i128 cb = static_cast<i128>(b.code) << (frac - b.fmt.frac_bits);
    return {rescale_code(subtract ? ca - cb : ca + cb, frac, out, mode), out};
}

}  // namespace

Fx add_fx(Fx a, Fx b, QFormat out, RoundMode mode) { return add_aligned(a, b, false, out, mode); }
Fx sub_fx(Fx a, Fx b, QFormat out, RoundMode mode) { return add_aligned(a, b, true, out, mode); }

Fx ones_complement_sub1(Fx f) {
    if (f.fmt.is_signed || f.fmt.int_bits != 0) {
        throw ConfigError("ones_complement_sub1 needs an unsigned fractional-only format, got " +
                          f.fmt.to_string());
    }
    return {~f.code & f.fmt.max_code(), f.fmt};
}

SignMagnitude abs_split(Fx x) {
    if (!x.fmt.is_signed) {
        throw ConfigError("abs_split needs a signed format, got " + x.fmt.to_string());
    }
    const QFormat mag = x.fmt.magnitude();
    if (x.code >= 0) return {false, {x.code, mag}};
    if (x.code == x.fmt.min_code()) return {true, {mag.max_code(), mag}};
    return {true, {-x.code, mag}};
}

Fx apply_sign(bool negative, Fx magnitude, QFormat out) {
    require_valid(out);
    const std::int64_t code = rescale_code(magnitude.code, magnitude.fmt.frac_bits, out,
                                           RoundMode::nearest_even);
    if (!negative) return {code, out};
    return {static_cast<std::int64_t>(saturate(-static_cast<i128>(code), out)), out};
}

}  // namespace vftanh
