#include "vftanh/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vftanh/error.hpp"

namespace vftanh {

double reference_tanh(double x) {
    const long double ex = std::exp(static_cast<long double>(x));
    const long double emx = std::exp(-static_cast<long double>(x));
    if (std::isinf(ex)) return 1.0;
    if (std::isinf(emx)) return -1.0;
    return static_cast<double>((ex - emx) / (ex + emx));
}

PwlTable PwlTable::uniform(double spacing, double end) {
    if (!(spacing > 0.0) || !(end > 0.0)) throw ConfigError("PWL spacing and end must be positive");
    PwlTable t;
    const auto n = static_cast<int>(std::floor(end / spacing + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double x = i * spacing;
        t.knots.emplace_back(x, reference_tanh(x));
    }
    if (t.knots.back().first < end) t.knots.emplace_back(end, reference_tanh(end));
    return t;
}

void PwlTable::validate() const {
    if (knots.empty() || knots.front().first != 0.0 || knots.front().second != 0.0) {
        throw ConfigError("PWL table must start at (0, 0)");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first)) throw ConfigError("PWL knots must be strictly ascending");
        if (knots[i].second < knots[i - 1].second) throw ConfigError("PWL values must be nondecreasing");
    }
}

double pwl_tanh(double x, const PwlTable& table) {
    const double a = std::fabs(x);
    const auto& k = table.knots;
    double y;
    if (a >= k.back().first) {
        y = k.back().second;
    } else {
        const auto hi = std::upper_bound(k.begin(), k.end(), a,
                                         [](double v, const auto& knot) { return v < knot.first; });
        const auto lo = hi - 1;
        const double w = (a - lo->first) / (hi->first - lo->first);
        y = lo->second + w * (hi->second - lo->second);
    }
    return x < 0 ? -y : y;
}

double taylor_tanh(double x, int terms) {
    static constexpr std::array<double, 6> coeff = {
        1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0, -1382.0 / 155925.0};
    if (terms < 1 || terms > static_cast<int>(coeff.size())) {
        throw ConfigError("Taylor term count must be 1..6, got " + std::to_string(terms));
    }
    const double x2 = x * x;
    double power = x;
    double sum = 0.0;
    for (int i = 0; i < terms; ++i) {
        sum += coeff[static_cast<std::size_t>(i)] * power;
        power *= x2;
    }
    return sum;
}

}  // namespace vftanh
