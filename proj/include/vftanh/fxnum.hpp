#pragma once

#include <cstdint>
#include <string>

namespace vftanh {

// Double-width accumulator for products of 62-bit codes.
__extension__ typedef __int128 wide_int;

/// Fixed-point layout: optional sign bit, integer bits, fractional bits.
/// Written as "s3.12", "s.15", "u0.18".
struct QFormat {
    bool is_signed = true;
    int int_bits = 0;
    int frac_bits = 0;

    static constexpr int kMaxWidth = 62;

    constexpr int width() const { return (is_signed ? 1 : 0) + int_bits + frac_bits; }
    constexpr bool valid() const {
        return int_bits >= 0 && frac_bits >= 0 && width() >= 1 && width() <= kMaxWidth;
    }
    constexpr std::int64_t max_code() const {
        return (std::int64_t{1} << (int_bits + frac_bits)) - 1;
    }
    constexpr std::int64_t min_code() const {
        return is_signed ? -(std::int64_t{1} << (int_bits + frac_bits)) : 0;
    }
    double ulp() const;
    double max_value() const;
    double min_value() const;

    // Unsigned layout with the same integer and fractional bits.
    constexpr QFormat magnitude() const { return {false, int_bits, frac_bits}; }

    std::string to_string() const;

    friend constexpr bool operator==(const QFormat&, const QFormat&) = default;
};

constexpr QFormat signed_fmt(int int_bits, int frac_bits) { return {true, int_bits, frac_bits}; }
constexpr QFormat unsigned_fmt(int int_bits, int frac_bits) { return {false, int_bits, frac_bits}; }

/// Throws ConfigError if the format is out of range.
void require_valid(const QFormat& fmt);

enum class RoundMode { truncate, nearest_even };

const char* to_string(RoundMode mode);

/// Fixed-point value: raw two's-complement code in a given format.
struct Fx {
    std::int64_t code = 0;
    QFormat fmt{};

    /// Validating constructor; throws ConfigError when the code does not fit.
    static Fx from_code(std::int64_t code, QFormat fmt);

    double value() const;

    friend constexpr bool operator==(const Fx&, const Fx&) = default;
};

/// Nearest in-range value under `mode`, saturating out-of-range input.
Fx quantize(double x, QFormat fmt, RoundMode mode);

/// code * 2^-frac_bits, exact.
double to_real(Fx v);

/// Saturating requantization of a code with `from_frac` fractional bits
/// into `out`. Shared by every width-changing primitive.
std::int64_t rescale_code(wide_int code, int from_frac, QFormat out, RoundMode mode);

/// Converts `v` to `out`, rounding dropped bits and saturating.
Fx requantize(Fx v, QFormat out, RoundMode mode);

/// Full-width product of codes, rounded once into `out`.
Fx mul_fx(Fx a, Fx b, QFormat out, RoundMode mode);

/// Same as mul_fx, with the product additionally scaled by 2^-shift before
/// the single rounding step.
Fx mul_fx_shifted(Fx a, Fx b, int shift, QFormat out, RoundMode mode);

/// Exact a + b / a - b aligned to the finer operand, then rounded into `out`.
Fx add_fx(Fx a, Fx b, QFormat out, RoundMode mode);
Fx sub_fx(Fx a, Fx b, QFormat out, RoundMode mode);

/// Approximates 1 - f by inverting every bit of f's code; the result is
/// exactly one ulp below 1 - f. f must be unsigned and fractional-only.
Fx ones_complement_sub1(Fx f);

struct SignMagnitude {
    bool negative = false;
    Fx magnitude;
};

/// Splits a signed value into sign and magnitude in the unsigned counterpart
/// format. The most-negative code saturates to the largest magnitude.
SignMagnitude abs_split(Fx x);

/// Inverse of abs_split for the output side: negates into the signed format.
Fx apply_sign(bool negative, Fx magnitude, QFormat out);

}  // namespace vftanh
