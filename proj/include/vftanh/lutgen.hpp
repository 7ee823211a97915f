#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vftanh/fxnum.hpp"

namespace vftanh {

/// (1 - tanh a) / (1 + tanh a), i.e. e^{-2a}. Always in (0, 1] for a >= 0,
/// which is what lets every stored factor live in a fractional-only format.
double velocity_factor(double a);

/// (1 + tanh a) / (1 - tanh a) = e^{2a}; the reciprocal convention, >= 1.
double velocity_factor_original(double a);

/// (1 - f) / (1 + f). Inverse of velocity_factor.
double tanh_from_factor(double f);

/// (f - 1) / (f + 1). Inverse of velocity_factor_original.
double tanh_from_factor_original(double f);

struct GroupingScheme {
    int group_width = 4;  // 1, 2 or 4 address bits per LUT
    bool shuffle = true;

    friend bool operator==(const GroupingScheme&, const GroupingScheme&) = default;
};

using BitGroup = std::vector<int>;

/// Partitions magnitude bit indices {0..bits-1} (0 = lightest weight) into
/// ceil(bits / group_width) address groups.
///
/// Unshuffled groups are consecutive ascending runs. Shuffled groups are dealt
/// from both ends: index i is paired with bits-1-i, and for 4-bit groups pair j
/// is joined with pair (pairs-1-j), so every LUT sees a mix of heavy and light
/// weights. For 16 bits the first group is {0, 7, 8, 15}. Indices left over
/// (the middle of the range when group_width does not divide the bit count)
/// form a final partial group. Each group is sorted ascending.
std::vector<BitGroup> shuffle_map(int bits, int group_width, bool shuffle);

/// One grouped ROM of velocity factors. Address bit i selects input magnitude
/// bit bit_indices[i]; entries[addr] is the product of the factors of the set
/// bits, rounded into entry_fmt.
struct VelocityLut {
    std::vector<int> bit_indices;
    QFormat entry_fmt{false, 0, 18};
    std::vector<Fx> entries;

    std::size_t address_bits() const { return bit_indices.size(); }
    std::size_t size() const { return entries.size(); }

    /// Gathers this LUT's address from a magnitude code.
    std::uint32_t address_of(std::int64_t magnitude_code) const;
};

/// Weight exponent of magnitude bit `index` for an input with `frac_bits`.
constexpr int bit_weight_exponent(int index, int frac_bits) { return index - frac_bits; }

/// Builds one LUT per group of the magnitude bits of `input_fmt`.
/// Address 0 (the exact factor 1.0) is stored as the all-ones code; the
/// datapath never multiplies by it. Entries whose product falls below half an
/// ulp are stored as the smallest positive code so every entry stays in (0, 1].
std::vector<VelocityLut> build_luts(QFormat input_fmt, GroupingScheme scheme, QFormat entry_fmt,
                                    RoundMode mode = RoundMode::nearest_even);

/// Unquantized product of per-group velocity factors for a magnitude code:
/// each group's factor is the product over its set bits, then the groups are
/// multiplied together.
double grouped_factor_product(std::int64_t magnitude_code, int frac_bits,
                              const std::vector<BitGroup>& groups);

/// ROM-init text: one zero-padded lowercase hex word per line.
std::string export_memh(const VelocityLut& lut);

/// Parses memh text back into raw codes. Throws ConfigError on bad lines.
std::vector<std::int64_t> parse_memh(std::string_view text);

/// Plain-text manifest: one line per LUT with index, bit indices and format.
std::string export_manifest(const std::vector<VelocityLut>& luts);

}  // namespace vftanh
