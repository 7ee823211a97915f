#pragma once

#include <utility>
#include <vector>

namespace vftanh {

/// (e^x - e^-x) / (e^x + e^-x), evaluated in long double. Oracle for all
/// error measurements.
double reference_tanh(double x);

/// Knots over [0, end] for a piecewise-linear approximation of tanh, odd
/// extension for negative inputs.
struct PwlTable {
    std::vector<std::pair<double, double>> knots;  // (input, value), ascending

    /// Knots at 0, spacing, 2*spacing, ... up to and including `end`.
    static PwlTable uniform(double spacing, double end);

    /// Throws ConfigError unless knots are strictly ascending, values
    /// nondecreasing and the first knot is (0, 0).
    void validate() const;
};

/// Linear interpolation on |x|, constant past the last knot, odd-extended.
double pwl_tanh(double x, const PwlTable& table);

/// x - x^3/3 + 2x^5/15 - 17x^7/315 + ... truncated to `terms` terms (1..6).
double taylor_tanh(double x, int terms);

}  // namespace vftanh
