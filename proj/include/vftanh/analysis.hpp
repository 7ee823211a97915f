#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vftanh/baselines.hpp"
#include "vftanh/datapath.hpp"
#include "vftanh/domain.hpp"
#include "vftanh/fxnum.hpp"

namespace vftanh {

struct ErrorReport {
    std::string config;
    double max_abs_error = 0.0;   // against the real-valued tanh
    double mean_abs_error = 0.0;
    double max_error_ulps = 0.0;  // max_abs_error in output lsbs
    std::int64_t max_code_error = 0;  // against the correctly rounded output code
    Fx worst_input;
    std::uint64_t samples = 0;
};

/// Largest input width exhaustive_sweep accepts.
inline constexpr int kMaxSweepWidth = 24;

/// Evaluates `eval` on every code of `input_fmt` and scores it against tanh.
/// Work is split into fixed-size code blocks merged in block order, so the
/// report is identical for any `jobs`.
ErrorReport sweep_codes(std::string label, QFormat input_fmt, QFormat output_fmt,
                        const std::function<Fx(Fx)>& eval, int jobs = 1);

/// Exhaustive error of the configured datapath. Throws ConfigError for
/// inputs wider than kMaxSweepWidth.
ErrorReport exhaustive_sweep(const TanhConfig& cfg, int jobs = 1);

struct Table2Row {
    int nr_stages = 0;  // 0: exact divider
    Subtractor subtractor = Subtractor::twos;
    ErrorReport report;

    double max_error() const { return report.max_abs_error; }
};

/// Sweeps {0, 2, 3} stages x {ones, twos}; exact-divider rows first, then
/// ascending stages, ones before twos.
std::vector<Table2Row> table2(const TanhConfig& base, int jobs = 1);

const Table2Row& find_row(const std::vector<Table2Row>& rows, int nr_stages, Subtractor sub);

struct MethodComparison {
    ErrorReport optimized;
    ErrorReport published;
    ErrorReport pwl;
    ErrorReport taylor;

    std::vector<ErrorReport> rows() const { return {optimized, published, pwl, taylor}; }
};

/// All four methods on the input grid of `cfg`. Real-valued baselines are
/// rounded only at the output.
MethodComparison compare_methods(const TanhConfig& cfg, const PwlTable& pwl, int taylor_terms,
                                 int jobs = 1);

/// Two's-complement hex of a code at its format width, e.g. "0x8000".
std::string code_hex(Fx v);

std::string format_text(const std::vector<ErrorReport>& reports);
std::string format_csv(const std::vector<ErrorReport>& reports);

}  // namespace vftanh
