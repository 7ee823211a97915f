#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vftanh/fxnum.hpp"
#include "vftanh/lutgen.hpp"

namespace vftanh {

enum class Subtractor { ones, twos };
enum class Variant { optimized, published };

const char* to_string(Subtractor s);
const char* to_string(Variant v);

/// Linear reciprocal seed x0 = c0 - c1 * d over d in [0.5, 1). When
/// operand_bits > 0 the seed logic sees d truncated to that many fractional
/// bits; 0 uses the full operand.
struct NrSeed {
    double c0 = 3.0;
    double c1 = 2.0;
    int operand_bits = 0;

    /// 3 - 2d: exact at both ends of the interval, worst relative error 1/8 at
    /// d = 3/4. Needs only a shift and a subtract.
    static constexpr NrSeed chord(int operand_bits = 0) { return {3.0, 2.0, operand_bits}; }
    /// 48/17 - 32/17 d: equioscillating fit, worst relative error 1/17.
    static constexpr NrSeed minimax() { return {48.0 / 17.0, 32.0 / 17.0, 0}; }

    /// Seed value in real arithmetic, including the operand truncation.
    double initial(double d) const;
    /// Relative error 1 - d * x0 of the unquantized seed.
    double relative_error(double d) const { return 1.0 - d * initial(d); }

    friend bool operator==(const NrSeed&, const NrSeed&) = default;
};

/// Full description of one tanh datapath instance.
///
/// `mult_fmt` fixes the fractional precision kept after every internal
/// multiplier; registers that need headroom (the velocity product, which may
/// be exactly 1.0, and the reciprocal iterates in (1, 2]) reuse its fractional
/// width with the integer bits they need.
struct TanhConfig {
    QFormat input_fmt = signed_fmt(3, 12);
    QFormat output_fmt = signed_fmt(0, 15);
    QFormat lut_fmt = unsigned_fmt(0, 18);
    QFormat mult_fmt = unsigned_fmt(0, 16);
    GroupingScheme grouping{};
    int nr_stages = 3;  // 0 selects an exact divider
    Subtractor subtractor = Subtractor::twos;
    Variant variant = Variant::optimized;
    int published_threshold_exp = -7;  // bits lighter than 2^exp go through the linear correction
    NrSeed seed = NrSeed::chord(6);
    RoundMode lut_round = RoundMode::nearest_even;
    RoundMode internal_round = RoundMode::nearest_even;
    RoundMode reciprocal_round = RoundMode::nearest_even;
    RoundMode output_round = RoundMode::nearest_even;

    /// s3.12 in, s.15 out, 18-bit LUTs, 16-bit multipliers, 4-bit shuffled
    /// groups, three reciprocal stages, exact subtractor.
    static TanhConfig reference();
    /// s3.5 in, s.7 out with LUT and multiplier widths scaled down to match.
    static TanhConfig small();

    /// Throws ConfigError describing the first inconsistency.
    void validate() const;

    int magnitude_bits() const { return input_fmt.int_bits + input_fmt.frac_bits; }
    QFormat magnitude_fmt() const { return input_fmt.magnitude(); }
    QFormat factor_fmt() const { return unsigned_fmt(1, mult_fmt.frac_bits); }
    QFormat reciprocal_fmt() const { return unsigned_fmt(2, mult_fmt.frac_bits); }
    QFormat output_magnitude_fmt() const { return output_fmt.magnitude(); }

    /// Smallest magnitude code at or above the clamp threshold.
    std::int64_t clamp_code() const;

    /// One-line description, e.g. "s3.12->s.15 lut=18 mult=16 g4s nr=3 sub=twos optimized".
    std::string summary() const;
};

/// Intermediate values of one evaluation, in pipeline order.
struct TanhTrace {
    struct LutRead {
        std::size_t lut = 0;
        std::uint32_t address = 0;
        Fx entry;
        bool bypassed = false;
    };

    Fx input;
    bool negative = false;
    Fx magnitude;
    bool saturated = false;
    std::vector<LutRead> reads;
    std::vector<Fx> products;  // multiplier-tree outputs, level by level
    Fx factor;                 // velocity product f
    Fx numerator;
    Fx denominator;            // (1 + f) / 2, or the normalized divisor
    int denominator_shift = 1;
    std::vector<Fx> nr_iterates;  // x0 .. x_stages
    Fx quotient;                  // tanh of the magnitude before the sign
    std::optional<Fx> residual;   // published variant only
    std::optional<Fx> coarse;     // published variant: tanh of the heavy bits
    Fx output;
};

/// Precomputed per-bit factors for the published variant, original (>= 1)
/// convention, for magnitude bits with weight >= 2^published_threshold_exp.
struct FactorRegisters {
    std::vector<int> bit_indices;
    QFormat fmt{false, 0, 0};
    std::vector<Fx> factors;  // factors[i] belongs to bit_indices[i]
};

FactorRegisters build_registers(const TanhConfig& cfg);

/// Product of the LUT entries addressed by `magnitude`, reduced pairwise
/// (group 0 with 1, 2 with 3, ...) at mult precision. Groups addressed at 0
/// contribute exactly 1.0 and are skipped. Result is in cfg.factor_fmt().
Fx velocity_product(Fx magnitude, const TanhConfig& cfg, const std::vector<VelocityLut>& luts,
                    TanhTrace* trace = nullptr);

/// Newton-Raphson reciprocal of d in [0.5, 1): x <- x (2 - d x) from the
/// configured seed, every product kept at cfg.reciprocal_fmt().
/// Throws DomainError for d outside [0.5, 1).
Fx nr_reciprocal(Fx d, int stages, const TanhConfig& cfg, std::vector<Fx>* iterates = nullptr);

/// (1 - f) / (1 + f) for f in (0, 1] at factor precision. The denominator is
/// formed by prefixing a 1 bit and read with one extra fractional bit, so it
/// already lies in [0.5, 1); the matching factor of 2 is absorbed by the
/// output rounding shift. Returns the unsigned magnitude in output precision.
Fx final_stage(Fx f, const TanhConfig& cfg, TanhTrace* trace = nullptr);

/// Optimized pipeline: sign split, clamp, velocity product, final stage,
/// sign restore. Throws ConfigError if `luts` do not belong to `cfg`.
Fx tanh_fx(Fx x, const TanhConfig& cfg, const std::vector<VelocityLut>& luts,
           TanhTrace* trace = nullptr);

/// Per-bit register product over the heavy bits, tanh of that partial sum,
/// then t + r (1 - t^2) for the light residual r.
Fx tanh_published(Fx x, const TanhConfig& cfg, const FactorRegisters& registers,
                  TanhTrace* trace = nullptr);

/// Throws ConfigError unless `luts` are what build_luts produces for `cfg`'s
/// bit grouping and entry format.
void check_luts(const TanhConfig& cfg, const std::vector<VelocityLut>& luts);

/// A validated configuration with its tables built once.
class TanhUnit {
public:
    explicit TanhUnit(TanhConfig cfg);

    const TanhConfig& config() const { return cfg_; }
    const std::vector<VelocityLut>& luts() const { return luts_; }
    const FactorRegisters& registers() const { return registers_; }

    /// Dispatches on cfg.variant.
    Fx operator()(Fx x, TanhTrace* trace = nullptr) const;
    Fx eval_code(std::int64_t code, TanhTrace* trace = nullptr) const {
        return (*this)(Fx{code, cfg_.input_fmt}, trace);
    }

private:
    TanhConfig cfg_;
    std::vector<VelocityLut> luts_;
    FactorRegisters registers_;
};

}  // namespace vftanh
