#include "vftanh/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "vftanh/error.hpp"

namespace vftanh {

namespace {

constexpr std::int64_t kBlock = 4096;

struct Partial {
    double max_abs = -1.0;
    std::int64_t worst_code = 0;
    double sum_abs = 0.0;
    std::int64_t max_code_error = 0;
};

}  // namespace

ErrorReport sweep_codes(std::string label, QFormat input_fmt, QFormat output_fmt,
                        const std::function<Fx(Fx)>& eval, int jobs) {
    require_valid(input_fmt);
    require_valid(output_fmt);
    if (input_fmt.width() > kMaxSweepWidth) {
        throw ConfigError("exhaustive sweep limited to " + std::to_string(kMaxSweepWidth) +
                          "-bit inputs, got " + input_fmt.to_string());
    }
    const std::int64_t lo = input_fmt.min_code();
    const std::int64_t count = input_fmt.max_code() - lo + 1;
    const std::int64_t blocks = (count + kBlock - 1) / kBlock;
    std::vector<Partial> partials(static_cast<std::size_t>(blocks));

    auto run_block = [&](std::int64_t b) {
        Partial p;
        const std::int64_t first = lo + b * kBlock;
        const std::int64_t last = std::min(first + kBlock, lo + count);
        for (std::int64_t code = first; code < last; ++code) {
            const Fx x{code, input_fmt};
            const Fx y = eval(x);
            const double exact = reference_tanh(to_real(x));
            const double err = std::fabs(to_real(y) - exact);
            const Fx rounded = quantize(exact, output_fmt, RoundMode::nearest_even);
            const std::int64_t code_err = std::llabs(rounded.code - y.code);
            p.sum_abs += err;
            p.max_code_error = std::max(p.max_code_error, code_err);
            if (err > p.max_abs) {
                p.max_abs = err;
                p.worst_code = code;
            }
        }
        partials[static_cast<std::size_t>(b)] = p;
    };

    const int workers = static_cast<int>(std::clamp<std::int64_t>(jobs, 1, blocks));
    if (workers == 1) {
        for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::int64_t b = next++; b < blocks; b = next++) run_block(b);
            });
        }
        for (auto& t : pool) t.join();
    }

    ErrorReport r;
    r.config = std::move(label);
    r.samples = static_cast<std::uint64_t>(count);
    double sum = 0.0;
    Partial best;
    for (const Partial& p : partials) {
        sum += p.sum_abs;
        r.max_code_error = std::max(r.max_code_error, p.max_code_error);
        if (p.max_abs > best.max_abs) best = p;
    }
    r.max_abs_error = best.max_abs;
    r.worst_input = {best.worst_code, input_fmt};
    r.mean_abs_error = sum / static_cast<double>(count);
    r.max_error_ulps = r.max_abs_error / output_fmt.ulp();
    return r;
}

ErrorReport exhaustive_sweep(const TanhConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.input_fmt.width() > kMaxSweepWidth) {
        throw ConfigError("exhaustive sweep limited to " + std::to_string(kMaxSweepWidth) +
                          "-bit inputs, got " + cfg.input_fmt.to_string());
    }
    const TanhUnit unit(cfg);
    return sweep_codes(cfg.summary(), cfg.input_fmt, cfg.output_fmt,
                       [&unit](Fx x) { return unit(x); }, jobs);
}

std::vector<Table2Row> table2(const TanhConfig& base, int jobs) {
    std::vector<Table2Row> rows;
    for (int stages : {0, 2, 3}) {
        for (Subtractor sub : {Subtractor::ones, Subtractor::twos}) {
            TanhConfig cfg = base;
            cfg.nr_stages = stages;
            cfg.subtractor = sub;
            rows.push_back({stages, sub, exhaustive_sweep(cfg, jobs)});
        }
    }
    return rows;
}

const Table2Row& find_row(const std::vector<Table2Row>& rows, int nr_stages, Subtractor sub) {
    for (const auto& r : rows) {
        if (r.nr_stages == nr_stages && r.subtractor == sub) return r;
    }
    throw ConfigError("no row for " + std::to_string(nr_stages) + " stages / " + to_string(sub));
}

MethodComparison compare_methods(const TanhConfig& cfg, const PwlTable& pwl, int taylor_terms, int jobs) {
    cfg.validate();
    pwl.validate();
    taylor_tanh(0.0, taylor_terms);  // rejects bad term counts up front

    MethodComparison c;
    TanhConfig opt = cfg;
    opt.variant = Variant::optimized;
    TanhConfig pub = cfg;
    pub.variant = Variant::published;
    c.optimized = exhaustive_sweep(opt, jobs);
    c.published = exhaustive_sweep(pub, jobs);

    const QFormat out = cfg.output_fmt;
    const RoundMode mode = cfg.output_round;
    std::ostringstream pwl_label;
    pwl_label << "pwl knots=" << pwl.knots.size() << " end=" << pwl.knots.back().first;
    c.pwl = sweep_codes(pwl_label.str(), cfg.input_fmt, out,
                        [&](Fx x) { return quantize(pwl_tanh(to_real(x), pwl), out, mode); }, jobs);
    c.taylor = sweep_codes("taylor terms=" + std::to_string(taylor_terms), cfg.input_fmt, out,
                           [&](Fx x) { return quantize(taylor_tanh(to_real(x), taylor_terms), out, mode); },
                           jobs);
    return c;
}

std::string code_hex(Fx v) {
    const int width = v.fmt.width();
    const int digits = (width + 3) / 4;
    const auto mask = width >= 64 ? ~0ULL : ((1ULL << width) - 1);
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%0*llx", digits,
                  static_cast<unsigned long long>(static_cast<std::uint64_t>(v.code) & mask));
    return buf;
}

std::string format_text(const std::vector<ErrorReport>& reports) {
    std::size_t w = 6;
    for (const auto& r : reports) w = std::max(w, r.config.size());
    std::ostringstream os;
    char line[512];
    std::snprintf(line, sizeof line, "%-*s  %12s  %12s  %8s  %8s  %10s  %s\n", static_cast<int>(w),
                  "config", "max_abs", "mean_abs", "max_ulps", "max_code", "worst_in", "samples");
    os << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-*s  %12.4e  %12.4e  %8.3f  %8lld  %10s  %llu\n",
                      static_cast<int>(w), r.config.c_str(), r.max_abs_error, r.mean_abs_error,
                      r.max_error_ulps, static_cast<long long>(r.max_code_error),
                      code_hex(r.worst_input).c_str(), static_cast<unsigned long long>(r.samples));
        os << line;
    }
    return os.str();
}

std::string format_csv(const std::vector<ErrorReport>& reports) {
    std::ostringstream os;
    os << "config,max_abs_error,mean_abs_error,max_error_ulps,worst_input_hex,samples\n";
    char line[512];
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%s,%.9e,%.9e,%.6f,%s,%llu\n", r.config.c_str(), r.max_abs_error,
                      r.mean_abs_error, r.max_error_ulps, code_hex(r.worst_input).c_str(),
                      static_cast<unsigned long long>(r.samples));
        os << line;
    }
    return os.str();
}

}  // namespace vftanh
