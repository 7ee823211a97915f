#include "vftanh/datapath.hpp"

#include <cmath>
#include <sstream>

#include "vftanh/domain.hpp"
#include "vftanh/error.hpp"

namespace vftanh {

double clamp_threshold(int frac_out_bits) {
    if (frac_out_bits < 1) throw ConfigError("clamp threshold needs at least one output bit");
    return std::atanh(1.0 - std::ldexp(1.0, -frac_out_bits));
}

double clamp_threshold_coarse(int frac_out_bits) {
    if (frac_out_bits < 2) throw ConfigError("coarse clamp threshold needs at least two output bits");
    return std::atanh(1.0 - std::ldexp(1.0, -(frac_out_bits - 1)));
}

const char* to_string(Subtractor s) { return s == Subtractor::ones ? "ones" : "twos"; }
const char* to_string(Variant v) { return v == Variant::optimized ? "optimized" : "published"; }

double NrSeed::initial(double d) const {
    const double operand = operand_bits > 0 ? std::ldexp(std::floor(std::ldexp(d, operand_bits)), -operand_bits) : d;
    return c0 - c1 * operand;
}

TanhConfig TanhConfig::reference() { return TanhConfig{}; }

TanhConfig TanhConfig::small() {
    TanhConfig cfg;
    cfg.input_fmt = signed_fmt(3, 5);
    cfg.output_fmt = signed_fmt(0, 7);
    cfg.lut_fmt = unsigned_fmt(0, 10);
    cfg.mult_fmt = unsigned_fmt(0, 8);
    return cfg;
}

void TanhConfig::validate() const {
    require_valid(input_fmt);
    require_valid(output_fmt);
    require_valid(lut_fmt);
    require_valid(mult_fmt);
    if (!input_fmt.is_signed) throw ConfigError("input format must be signed: " + input_fmt.to_string());
    if (magnitude_bits() < 1) throw ConfigError("input format has no magnitude bits");
    if (!output_fmt.is_signed || output_fmt.int_bits != 0 || output_fmt.frac_bits < 2) {
        throw ConfigError("output format must be signed fractional-only (s.N, N >= 2): " +
                          output_fmt.to_string());
    }
    if (lut_fmt.is_signed || lut_fmt.int_bits != 0 || lut_fmt.frac_bits < 1) {
        throw ConfigError("LUT format must be unsigned fractional-only: " + lut_fmt.to_string());
    }
    if (mult_fmt.is_signed || mult_fmt.int_bits != 0 || mult_fmt.frac_bits < 2) {
        throw ConfigError("multiplier format must be unsigned fractional-only: " + mult_fmt.to_string());
    }
    if (mult_fmt.frac_bits > 40 || lut_fmt.frac_bits > 40) {
        throw ConfigError("LUT and multiplier precision are limited to 40 bits");
    }
    if (grouping.group_width != 1 && grouping.group_width != 2 && grouping.group_width != 4) {
        throw ConfigError("group width must be 1, 2 or 4, got " + std::to_string(grouping.group_width));
    }
    if (nr_stages < 0 || nr_stages > 8) {
        throw ConfigError("reciprocal stages must be in 0..8, got " + std::to_string(nr_stages));
    }
    const double x0_lo = seed.c0 - seed.c1;        // d -> 1
    const double x0_hi = seed.c0 - seed.c1 * 0.5;  // d = 0.5
    if (!(x0_lo > 0.0 && x0_hi < 4.0)) throw ConfigError("reciprocal seed leaves (0, 4) on [0.5, 1)");
    if (seed.operand_bits < 0 || seed.operand_bits > 40) throw ConfigError("seed operand bits must be 0..40");
    if (variant == Variant::published) {
        const int lightest = -input_fmt.frac_bits;
        const int heaviest = input_fmt.int_bits - 1;
        if (published_threshold_exp < lightest || published_threshold_exp > heaviest) {
            throw ConfigError("published threshold 2^" + std::to_string(published_threshold_exp) +
                              " outside the input bit weights");
        }
    }
}

std::int64_t TanhConfig::clamp_code() const {
    const double t = clamp_threshold(output_fmt.frac_bits);
    const auto code = static_cast<std::int64_t>(std::ceil(std::ldexp(t, input_fmt.frac_bits)));
    return std::min(code, magnitude_fmt().max_code() + 1);
}

std::string TanhConfig::summary() const {
    std::ostringstream os;
    os << input_fmt.to_string() << "->" << output_fmt.to_string() << " lut=" << lut_fmt.to_string()
       << " mult=" << mult_fmt.to_string() << " group=" << grouping.group_width
       << (grouping.shuffle ? " shuffle" : " linear") << " nr=" << nr_stages
       << " sub=" << to_string(subtractor) << " seed=" << seed.c0 << '-' << seed.c1 << 'd';
    if (seed.operand_bits > 0) os << '/' << seed.operand_bits;
    os << ' ' << to_string(variant);
    if (variant == Variant::published) os << " threshold=2^" << published_threshold_exp;
    return os.str();
}

namespace {

// Reduces optional leaves pairwise; absent operands pass the other side through.
std::optional<Fx> reduce_tree(std::vector<std::optional<Fx>> level, QFormat out, RoundMode mode,
                              TanhTrace* trace) {
    if (level.empty()) return std::nullopt;
    while (level.size() > 1) {
        std::vector<std::optional<Fx>> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            if (i + 1 == level.size()) {
                next.push_back(level[i]);
                continue;
            }
            const auto& a = level[i];
            const auto& b = level[i + 1];
            if (a && b) {
                next.push_back(mul_fx(*a, *b, out, mode));
                if (trace) trace->products.push_back(*next.back());
            } else {
                next.push_back(a ? a : b);
            }
        }
        level = std::move(next);
    }
    return level.front();
}

Fx one(QFormat fmt) { return {std::int64_t{1} << fmt.frac_bits, fmt}; }

Fx saturated_output(bool negative, const TanhConfig& cfg) {
    const QFormat mag = cfg.output_magnitude_fmt();
    return apply_sign(negative, {mag.max_code(), mag}, cfg.output_fmt);
}

Fx optimized_unchecked(Fx x, const TanhConfig& cfg, const std::vector<VelocityLut>& luts,
                       TanhTrace* trace) {
    const SignMagnitude sm = abs_split(x);
    if (trace) {
        *trace = TanhTrace{};
        trace->input = x;
        trace->negative = sm.negative;
        trace->magnitude = sm.magnitude;
    }
    Fx out;
    if (sm.magnitude.code >= cfg.clamp_code()) {
        out = saturated_output(sm.negative, cfg);
        if (trace) trace->saturated = true;
    } else {
        const Fx f = velocity_product(sm.magnitude, cfg, luts, trace);
        out = apply_sign(sm.negative, final_stage(f, cfg, trace), cfg.output_fmt);
    }
    if (trace) trace->output = out;
    return out;
}

}  // namespace

Fx velocity_product(Fx magnitude, const TanhConfig& cfg, const std::vector<VelocityLut>& luts,
                    TanhTrace* trace) {
    std::vector<std::optional<Fx>> leaves;
    leaves.reserve(luts.size());
    for (std::size_t j = 0; j < luts.size(); ++j) {
        const std::uint32_t addr = luts[j].address_of(magnitude.code);
        if (addr == 0) {
            leaves.emplace_back(std::nullopt);
        } else {
            leaves.emplace_back(luts[j].entries[addr]);
        }
        if (trace) trace->reads.push_back({j, addr, luts[j].entries[addr], addr == 0});
    }
    const QFormat fmt = cfg.factor_fmt();
    const auto product = reduce_tree(std::move(leaves), fmt, cfg.internal_round, trace);
    const Fx f = product ? requantize(*product, fmt, cfg.internal_round) : one(fmt);
    if (trace) trace->factor = f;
    return f;
}

Fx nr_reciprocal(Fx d, int stages, const TanhConfig& cfg, std::vector<Fx>* iterates) {
    const double dv = to_real(d);
    if (!(dv >= 0.5 && dv < 1.0)) {
        throw DomainError("reciprocal operand " + std::to_string(dv) + " outside [0.5, 1)");
    }
    if (stages < 0) throw ConfigError("negative reciprocal stage count");
    const QFormat fmt = cfg.reciprocal_fmt();
    const RoundMode mode = cfg.reciprocal_round;
    const Fx c0 = quantize(cfg.seed.c0, fmt, RoundMode::nearest_even);
    const Fx c1 = quantize(cfg.seed.c1, fmt, RoundMode::nearest_even);
    const Fx two = quantize(2.0, fmt, RoundMode::nearest_even);

    const Fx seed_operand =
        cfg.seed.operand_bits > 0 && cfg.seed.operand_bits < d.fmt.frac_bits
            ? requantize(d, unsigned_fmt(0, cfg.seed.operand_bits), RoundMode::truncate)
            : d;
    Fx x = sub_fx(c0, mul_fx(c1, seed_operand, fmt, mode), fmt, mode);
    if (iterates) iterates->push_back(x);
    for (int i = 0; i < stages; ++i) {
        const Fx dx = mul_fx(d, x, fmt, mode);
        x = mul_fx(x, sub_fx(two, dx, fmt, mode), fmt, mode);
        if (iterates) iterates->push_back(x);
    }
    return x;
}

Fx final_stage(Fx f, const TanhConfig& cfg, TanhTrace* trace) {
    const int F = cfg.mult_fmt.frac_bits;
    const QFormat out = cfg.output_magnitude_fmt();
    if (f.fmt.frac_bits != F) f = requantize(f, cfg.factor_fmt(), cfg.internal_round);
    if (f.code >= (std::int64_t{1} << F)) {
        // f == 1: zero magnitude
        const Fx zero{0, out};
        if (trace) trace->quotient = zero;
        return zero;
    }

    const Fx frac{f.code, unsigned_fmt(0, F)};
    const Fx numerator = cfg.subtractor == Subtractor::ones
                             ? ones_complement_sub1(frac)
                             : sub_fx(one(cfg.factor_fmt()), frac, cfg.factor_fmt(), RoundMode::truncate);
    // "1." prefixed to f, read as (1 + f) / 2
    const Fx denominator{(std::int64_t{1} << F) | frac.code, unsigned_fmt(0, F + 1)};

    Fx quotient;
    std::vector<Fx>* iterates = trace ? &trace->nr_iterates : nullptr;
    if (cfg.nr_stages == 0) {
        quotient = quantize(to_real(numerator) / (1.0 + to_real(frac)), out, cfg.output_round);
    } else {
        const Fx x = nr_reciprocal(denominator, cfg.nr_stages, cfg, iterates);
        quotient = mul_fx_shifted(numerator, x, 1, out, cfg.output_round);
    }
    if (trace) {
        trace->numerator = numerator;
        trace->denominator = denominator;
        trace->denominator_shift = 1;
        trace->quotient = quotient;
    }
    return quotient;
}

void check_luts(const TanhConfig& cfg, const std::vector<VelocityLut>& luts) {
    const auto groups = shuffle_map(cfg.magnitude_bits(), cfg.grouping.group_width, cfg.grouping.shuffle);
    if (groups.size() != luts.size()) {
        throw ConfigError("expected " + std::to_string(groups.size()) + " LUTs for " + cfg.summary() +
                          ", got " + std::to_string(luts.size()));
    }
    for (std::size_t j = 0; j < luts.size(); ++j) {
        if (luts[j].bit_indices != groups[j]) {
            throw ConfigError("LUT " + std::to_string(j) + " covers different bits than the configuration");
        }
        if (luts[j].entry_fmt != cfg.lut_fmt) {
            throw ConfigError("LUT " + std::to_string(j) + " format " + luts[j].entry_fmt.to_string() +
                              " does not match " + cfg.lut_fmt.to_string());
        }
        if (luts[j].entries.size() != (std::size_t{1} << groups[j].size())) {
            throw ConfigError("LUT " + std::to_string(j) + " has the wrong number of entries");
        }
    }
}

Fx tanh_fx(Fx x, const TanhConfig& cfg, const std::vector<VelocityLut>& luts, TanhTrace* trace) {
    cfg.validate();
    if (x.fmt != cfg.input_fmt) {
        throw ConfigError("input is " + x.fmt.to_string() + ", configuration expects " +
                          cfg.input_fmt.to_string());
    }
    check_luts(cfg, luts);
    return optimized_unchecked(x, cfg, luts, trace);
}

FactorRegisters build_registers(const TanhConfig& cfg) {
    FactorRegisters regs;
    const int frac_in = cfg.input_fmt.frac_bits;
    const int first = cfg.published_threshold_exp + frac_in;
    const int heaviest_exp = cfg.input_fmt.int_bits - 1;
    const double largest = velocity_factor_original(std::ldexp(1.0, heaviest_exp));
    const int int_bits = static_cast<int>(std::floor(std::log2(largest))) + 1;
    regs.fmt = unsigned_fmt(int_bits, cfg.lut_fmt.frac_bits);
    require_valid(regs.fmt);
    for (int i = std::max(first, 0); i < cfg.magnitude_bits(); ++i) {
        regs.bit_indices.push_back(i);
        regs.factors.push_back(quantize(velocity_factor_original(std::ldexp(1.0, bit_weight_exponent(i, frac_in))),
                                        regs.fmt, cfg.lut_round));
    }
    return regs;
}

Fx tanh_published(Fx x, const TanhConfig& cfg, const FactorRegisters& registers, TanhTrace* trace) {
    if (x.fmt != cfg.input_fmt) {
        throw ConfigError("input is " + x.fmt.to_string() + ", configuration expects " +
                          cfg.input_fmt.to_string());
    }
    const SignMagnitude sm = abs_split(x);
    if (trace) {
        *trace = TanhTrace{};
        trace->input = x;
        trace->negative = sm.negative;
        trace->magnitude = sm.magnitude;
    }
    if (sm.magnitude.code >= cfg.clamp_code()) {
        const Fx out = saturated_output(sm.negative, cfg);
        if (trace) {
            trace->saturated = true;
            trace->output = out;
        }
        return out;
    }

    const int F = cfg.mult_fmt.frac_bits;
    const RoundMode mode = cfg.internal_round;
    const QFormat frac_fmt = unsigned_fmt(0, F);
    const QFormat wide = unsigned_fmt(1, F);

    // Heavy bits: product of original-convention factors, then (f - 1) / (f + 1).
    std::vector<std::optional<Fx>> leaves;
    for (std::size_t i = 0; i < registers.bit_indices.size(); ++i) {
        if ((sm.magnitude.code >> registers.bit_indices[i]) & 1) {
            leaves.emplace_back(registers.factors[i]);
        } else {
            leaves.emplace_back(std::nullopt);
        }
    }
    const double clamp = clamp_threshold(cfg.output_fmt.frac_bits);
    const int product_int = static_cast<int>(std::floor(2.0 * clamp / std::log(2.0))) + 2;
    const QFormat product_fmt = unsigned_fmt(product_int, F);
    const auto product = reduce_tree(std::move(leaves), product_fmt, mode, trace);
    const Fx f = product ? requantize(*product, product_fmt, mode) : one(product_fmt);

    Fx coarse{0, frac_fmt};
    if (f.code > (std::int64_t{1} << F)) {
        const Fx numerator = sub_fx(f, one(product_fmt), product_fmt, RoundMode::truncate);
        const QFormat sum_fmt = unsigned_fmt(product_int + 1, F);
        const Fx sum = add_fx(f, one(product_fmt), sum_fmt, RoundMode::truncate);
        int width = 0;
        for (std::int64_t c = sum.code; c != 0; c >>= 1) ++width;
        const int shift = width - F;  // sum / 2^shift in [0.5, 1)
        const Fx normalized = requantize(Fx{sum.code, unsigned_fmt(0, F + shift)},
                                         unsigned_fmt(0, F + 1), RoundMode::truncate);
        if (cfg.nr_stages == 0) {
            coarse = quantize(to_real(numerator) / to_real(sum), frac_fmt, mode);
        } else {
            std::vector<Fx>* iterates = trace ? &trace->nr_iterates : nullptr;
            const Fx recip = nr_reciprocal(normalized, cfg.nr_stages, cfg, iterates);
            coarse = mul_fx_shifted(numerator, recip, shift, frac_fmt, mode);
        }
        if (trace) {
            trace->numerator = numerator;
            trace->denominator = normalized;
            trace->denominator_shift = shift;
        }
    }
    if (trace) {
        trace->factor = f;
        trace->coarse = coarse;
    }

    // Light bits: t + r (1 - t^2).
    const int light_bits = std::max(0, cfg.published_threshold_exp + cfg.input_fmt.frac_bits);
    const std::int64_t mask = (std::int64_t{1} << light_bits) - 1;
    const Fx residual{sm.magnitude.code & mask, sm.magnitude.fmt};
    const QFormat out = cfg.output_magnitude_fmt();
    Fx magnitude_out;
    if (residual.code == 0) {
        magnitude_out = requantize(coarse, out, cfg.output_round);
    } else {
        const Fx t2 = mul_fx(coarse, coarse, frac_fmt, mode);
        const Fx slope = sub_fx(one(wide), t2, wide, RoundMode::truncate);
        const Fx correction = mul_fx(residual, slope, frac_fmt, mode);
        magnitude_out = add_fx(coarse, correction, out, cfg.output_round);
    }
    const Fx result = apply_sign(sm.negative, magnitude_out, cfg.output_fmt);
    if (trace) {
        trace->residual = residual;
        trace->quotient = magnitude_out;
        trace->output = result;
    }
    return result;
}

TanhUnit::TanhUnit(TanhConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    luts_ = build_luts(cfg_.input_fmt, cfg_.grouping, cfg_.lut_fmt, cfg_.lut_round);
    if (cfg_.variant == Variant::published) registers_ = build_registers(cfg_);
}

Fx TanhUnit::operator()(Fx x, TanhTrace* trace) const {
    if (x.fmt != cfg_.input_fmt) {
        throw ConfigError("input is " + x.fmt.to_string() + ", configuration expects " +
                          cfg_.input_fmt.to_string());
    }
    if (cfg_.variant == Variant::published) return tanh_published(x, cfg_, registers_, trace);
    return optimized_unchecked(x, cfg_, luts_, trace);
}

}  // namespace vftanh
