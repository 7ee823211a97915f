#pragma once

namespace vftanh {

/// artanh(1 - 2^-b) = ln(2^(b+1) - 1) / 2. Beyond this magnitude tanh is
/// within one output lsb of 1 for an output with b fractional bits.
double clamp_threshold(int frac_out_bits);

/// artanh(1 - 2^-(b-1)), the looser bound one bit coarser.
double clamp_threshold_coarse(int frac_out_bits);

}  // namespace vftanh
