#include "vftanh/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "vftanh/analysis.hpp"
#include "vftanh/error.hpp"

namespace vftanh::cli {

namespace fs = std::filesystem;

QFormat parse_format(std::string_view text) {
    static const std::regex pattern(R"(^([su]?)(\d*)\.(\d+)$)");
    const std::string s(text);
    std::smatch m;
    if (!std::regex_match(s, m, pattern)) {
        throw ConfigError("malformed format '" + s + "' (expected e.g. s3.12, s.15, u0.18)");
    }
    QFormat fmt;
    fmt.is_signed = m[1].str() != "u";
    try {
        fmt.int_bits = m[2].length() == 0 ? 0 : std::stoi(m[2].str());
        fmt.frac_bits = std::stoi(m[3].str());
    } catch (const std::out_of_range&) {
        throw ConfigError("format '" + s + "' has an out-of-range bit count");
    }
    if (!fmt.valid()) throw ConfigError("format '" + s + "' is outside the supported widths");
    return fmt;
}

namespace {

struct Options {
    std::string in = "s3.12";
    std::string out = "s.15";
    int lut_bits = 18;
    int mult_bits = 16;
    int nr_stages = 3;
    int group = 4;
    bool shuffle = true;
    std::string sub = "twos";
    std::string variant = "optimized";
    std::string threshold = "-7";
    std::string seed = "chord";
    int seed_bits = 6;
    std::string lut_round = "nearest";
    std::string mult_round = "nearest";
    std::string out_round = "nearest";
    std::string nr_round = "nearest";
    int jobs = 1;
    std::string format = "text";
    std::string output;
    // compare
    double pwl_spacing = 0.25;
    int taylor_terms = 3;
    // eval
    std::string x;
};

RoundMode parse_round(const std::string& s) {
    if (s == "nearest") return RoundMode::nearest_even;
    if (s == "truncate") return RoundMode::truncate;
    throw ConfigError("unknown rounding mode '" + s + "' (nearest|truncate)");
}

int parse_threshold(const std::string& s) {
    std::string t = s;
    if (t.rfind("2^", 0) == 0) t = t.substr(2);
    try {
        std::size_t used = 0;
        const int e = std::stoi(t, &used);
        if (used == t.size()) return e;
    } catch (const std::exception&) {
    }
    throw ConfigError("threshold '" + s + "' must be a power-of-two exponent such as -7 or 2^-7");
}

TanhConfig build_config(const Options& o) {
    TanhConfig cfg;
    cfg.input_fmt = parse_format(o.in);
    cfg.output_fmt = parse_format(o.out);
    cfg.lut_fmt = unsigned_fmt(0, o.lut_bits);
    cfg.mult_fmt = unsigned_fmt(0, o.mult_bits);
    cfg.nr_stages = o.nr_stages;
    cfg.grouping = {o.group, o.shuffle};
    if (o.sub == "ones") cfg.subtractor = Subtractor::ones;
    else if (o.sub == "twos") cfg.subtractor = Subtractor::twos;
    else throw ConfigError("unknown subtractor '" + o.sub + "' (ones|twos)");
    if (o.variant == "optimized") cfg.variant = Variant::optimized;
    else if (o.variant == "published") cfg.variant = Variant::published;
    else throw ConfigError("unknown variant '" + o.variant + "' (optimized|published)");
    if (o.seed == "chord") cfg.seed = NrSeed::chord(o.seed_bits);
    else if (o.seed == "minimax") cfg.seed = {NrSeed::minimax().c0, NrSeed::minimax().c1, o.seed_bits};
    else throw ConfigError("unknown seed '" + o.seed + "' (chord|minimax)");
    cfg.published_threshold_exp = parse_threshold(o.threshold);
    cfg.lut_round = parse_round(o.lut_round);
    cfg.internal_round = parse_round(o.mult_round);
    cfg.output_round = parse_round(o.out_round);
    cfg.reciprocal_round = parse_round(o.nr_round);
    if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");
    if (o.format != "text" && o.format != "csv") throw ConfigError("unknown report format '" + o.format + "'");
    cfg.validate();
    return cfg;
}

void add_config_options(CLI::App* app, Options& o) {
    app->add_option("--in", o.in, "input format")->capture_default_str();
    app->add_option("--out", o.out, "output format")->capture_default_str();
    app->add_option("--lut-bits", o.lut_bits, "LUT entry fractional bits")->capture_default_str();
    app->add_option("--mult-bits", o.mult_bits, "multiplier fractional bits")->capture_default_str();
    app->add_option("--nr-stages", o.nr_stages, "reciprocal iterations (0 = exact divider)")
        ->capture_default_str();
    app->add_option("--group", o.group, "address bits per LUT (1, 2, 4)")->capture_default_str();
    app->add_flag("--shuffle,!--no-shuffle", o.shuffle, "mix heavy and light bits in each LUT");
    app->add_option("--sub", o.sub, "1 - f subtractor: ones|twos")->capture_default_str();
    app->add_option("--variant", o.variant, "optimized|published")->capture_default_str();
    app->add_option("--threshold", o.threshold, "published variant: log2 of the lightest register weight")
        ->capture_default_str();
    app->add_option("--seed", o.seed, "reciprocal seed: chord|minimax")->capture_default_str();
    app->add_option("--seed-bits", o.seed_bits, "operand fraction bits seen by the seed (0 = all)")
        ->capture_default_str();
    app->add_option("--lut-round", o.lut_round, "nearest|truncate")->capture_default_str();
    app->add_option("--mult-round", o.mult_round, "nearest|truncate")->capture_default_str();
    app->add_option("--out-round", o.out_round, "nearest|truncate")->capture_default_str();
    app->add_option("--nr-round", o.nr_round, "reciprocal multipliers: nearest|truncate")->capture_default_str();
}

void add_report_options(CLI::App* app, Options& o) {
    app->add_option("--jobs", o.jobs, "sweep worker threads")->capture_default_str();
    app->add_option("--format", o.format, "text|csv")->capture_default_str();
    app->add_option("-o,--output", o.output, "report file (default stdout)");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DomainError("cannot write " + path.string());
    f << content;
    if (!f.flush()) throw DomainError("failed writing " + path.string());
}

void emit(const Options& o, const std::string& content, std::ostream& out) {
    if (o.output.empty()) {
        out << content;
    } else {
        write_file(o.output, content);
    }
}

std::string render(const Options& o, const std::vector<ErrorReport>& reports) {
    return o.format == "csv" ? format_csv(reports) : format_text(reports);
}

std::string describe(Fx v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.9f code=%s (%s)", to_real(v), code_hex(v).c_str(),
                  v.fmt.to_string().c_str());
    return buf;
}

double parse_eval_input(const std::string& text) {
    std::string v = text;
    if (v.rfind("x=", 0) == 0) v = v.substr(2);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("eval input '" + text + "' must look like x=<number>");
}

std::string trace_text(const TanhTrace& t, const TanhConfig& cfg) {
    std::ostringstream os;
    os << "config       " << cfg.summary() << '\n';
    os << "input        " << describe(t.input) << '\n';
    os << "sign         " << (t.negative ? '-' : '+') << '\n';
    os << "magnitude    " << describe(t.magnitude) << '\n';
    if (t.saturated) {
        os << "clamp        saturated (|x| >= " << clamp_threshold(cfg.output_fmt.frac_bits) << ")\n";
    } else {
        for (const auto& r : t.reads) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "lut%-2zu addr=0x%x ", r.lut, r.address);
            os << buf << (r.bypassed ? "bypass" : describe(r.entry)) << '\n';
        }
        for (std::size_t i = 0; i < t.products.size(); ++i) {
            os << "product" << i << "     " << describe(t.products[i]) << '\n';
        }
        os << "factor       " << describe(t.factor) << '\n';
        if (t.coarse || t.quotient.code != 0 || !t.nr_iterates.empty()) {
            os << "numerator    " << describe(t.numerator) << '\n';
            os << "denominator  " << describe(t.denominator) << " shift=" << t.denominator_shift << '\n';
        }
        for (std::size_t i = 0; i < t.nr_iterates.size(); ++i) {
            os << "nr x" << i << "        " << describe(t.nr_iterates[i]) << '\n';
        }
        if (t.coarse) os << "coarse       " << describe(*t.coarse) << '\n';
        if (t.residual) os << "residual     " << describe(*t.residual) << '\n';
        os << "quotient     " << describe(t.quotient) << '\n';
    }
    os << "output       " << describe(t.output) << '\n';
    os << "reference    " << reference_tanh(to_real(t.input)) << '\n';
    return os.str();
}

int cmd_gen_lut(const Options& o, std::ostream& out) {
    const TanhConfig cfg = build_config(o);
    const auto luts = build_luts(cfg.input_fmt, cfg.grouping, cfg.lut_fmt, cfg.lut_round);
    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t j = 0; j < luts.size(); ++j) {
        files.emplace_back("lut" + std::to_string(j) + ".memh", export_memh(luts[j]));
    }
    files.emplace_back("manifest.txt", export_manifest(luts));

    const fs::path dir = o.output.empty() ? fs::path(".") : fs::path(o.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw DomainError("cannot create output directory " + dir.string());
    for (const auto& [name, content] : files) write_file(dir / name, content);
    out << "wrote " << luts.size() << " LUTs to " << dir.string() << '\n';
    return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const TanhConfig cfg = build_config(o);
    emit(o, render(o, {exhaustive_sweep(cfg, o.jobs)}), out);
    return kSuccess;
}

int cmd_table2(const Options& o, std::ostream& out) {
    const TanhConfig cfg = build_config(o);
    std::vector<ErrorReport> reports;
    for (const auto& row : table2(cfg, o.jobs)) reports.push_back(row.report);
    emit(o, render(o, reports), out);
    return kSuccess;
}

int cmd_compare(const Options& o, std::ostream& out) {
    const TanhConfig cfg = build_config(o);
    const PwlTable pwl = PwlTable::uniform(o.pwl_spacing, clamp_threshold(cfg.output_fmt.frac_bits));
    emit(o, render(o, compare_methods(cfg, pwl, o.taylor_terms, o.jobs).rows()), out);
    return kSuccess;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const TanhConfig cfg = build_config(o);
    const double x = parse_eval_input(o.x);
    const TanhUnit unit(cfg);
    TanhTrace trace;
    unit(quantize(x, cfg.input_fmt, RoundMode::nearest_even), &trace);
    emit(o, trace_text(trace, cfg), out);
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bit-accurate velocity-factor tanh datapath model", "vftanh"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen-lut", "write lut<j>.memh ROM images and manifest.txt");
    add_config_options(gen, o);
    gen->add_option("-o,--output", o.output, "output directory (default .)");

    auto* sweep = app.add_subcommand("sweep", "exhaustive error sweep of one configuration");
    add_config_options(sweep, o);
    add_report_options(sweep, o);

    auto* t2 = app.add_subcommand("table2", "sweep {0,2,3} reciprocal stages x {ones,twos} subtractor");
    add_config_options(t2, o);
    add_report_options(t2, o);

    auto* cmp = app.add_subcommand("compare", "optimized vs published vs PWL vs Taylor");
    add_config_options(cmp, o);
    add_report_options(cmp, o);
    cmp->add_option("--pwl-spacing", o.pwl_spacing, "PWL knot spacing")->capture_default_str();
    cmp->add_option("--taylor-terms", o.taylor_terms, "Taylor series terms")->capture_default_str();

    auto* ev = app.add_subcommand("eval", "trace one input through the datapath");
    add_config_options(ev, o);
    ev->add_option("x", o.x, "input, e.g. x=1.0")->required();
    ev->add_option("-o,--output", o.output, "trace file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*gen) return cmd_gen_lut(o, out);
        if (*sweep) return cmd_sweep(o, out);
        if (*t2) return cmd_table2(o, out);
        if (*cmp) return cmd_compare(o, out);
        if (*ev) return cmd_eval(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace vftanh::cli
