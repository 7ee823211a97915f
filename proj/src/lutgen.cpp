#include "vftanh/lutgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vftanh/error.hpp"

namespace vftanh {

double velocity_factor(double a) {
    const double t = std::tanh(a);
    return (1.0 - t) / (1.0 + t);
}

double velocity_factor_original(double a) {
    const double t = std::tanh(a);
    return (1.0 + t) / (1.0 - t);
}

double tanh_from_factor(double f) { return (1.0 - f) / (1.0 + f); }

double tanh_from_factor_original(double f) { return (f - 1.0) / (f + 1.0); }

std::vector<BitGroup> shuffle_map(int bits, int group_width, bool shuffle) {
    if (group_width != 1 && group_width != 2 && group_width != 4) {
        throw ConfigError("group width must be 1, 2 or 4, got " + std::to_string(group_width));
    }
    if (bits < 1) throw ConfigError("need at least one magnitude bit");

    std::vector<BitGroup> groups;
    if (!shuffle || group_width == 1) {
        for (int start = 0; start < bits; start += group_width) {
            BitGroup g;
            for (int i = start; i < std::min(bits, start + group_width); ++i) g.push_back(i);
            groups.push_back(std::move(g));
        }
        return groups;
    }

    std::vector<bool> used(static_cast<std::size_t>(bits), false);
    auto take_pair = [&](BitGroup& g, int p) {
        g.push_back(p);
        g.push_back(bits - 1 - p);
        used[static_cast<std::size_t>(p)] = true;
        used[static_cast<std::size_t>(bits - 1 - p)] = true;
    };

    const int pairs = bits / 2;
    const int full = bits / group_width;
    for (int j = 0; j < full; ++j) {
        BitGroup g;
        take_pair(g, j);
        if (group_width == 4) take_pair(g, pairs - 1 - j);
        std::sort(g.begin(), g.end());
        groups.push_back(std::move(g));
    }

    BitGroup rest;
    for (int i = 0; i < bits; ++i) {
        if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
    }
    if (!rest.empty()) groups.push_back(std::move(rest));
    return groups;
}

std::uint32_t VelocityLut::address_of(std::int64_t magnitude_code) const {
    std::uint32_t addr = 0;
    for (std::size_t i = 0; i < bit_indices.size(); ++i) {
        if ((magnitude_code >> bit_indices[i]) & 1) addr |= 1u << i;
    }
    return addr;
}

std::vector<VelocityLut> build_luts(QFormat input_fmt, GroupingScheme scheme, QFormat entry_fmt,
                                    RoundMode mode) {
    require_valid(input_fmt);
    require_valid(entry_fmt);
    if (!input_fmt.is_signed) {
        throw ConfigError("input format must be signed, got " + input_fmt.to_string());
    }
    if (entry_fmt.is_signed || entry_fmt.int_bits != 0) {
        throw ConfigError("LUT entry format must be unsigned fractional-only, got " +
                          entry_fmt.to_string());
    }

    const int bits = input_fmt.int_bits + input_fmt.frac_bits;
    std::vector<VelocityLut> luts;
    for (auto& group : shuffle_map(bits, scheme.group_width, scheme.shuffle)) {
        VelocityLut lut;
        lut.bit_indices = std::move(group);
        lut.entry_fmt = entry_fmt;
        const std::size_t n = std::size_t{1} << lut.bit_indices.size();
        lut.entries.reserve(n);
        lut.entries.push_back({entry_fmt.max_code(), entry_fmt});
        for (std::size_t addr = 1; addr < n; ++addr) {
            double product = 1.0;
            for (std::size_t i = 0; i < lut.bit_indices.size(); ++i) {
                if ((addr >> i) & 1u) {
                    const int e = bit_weight_exponent(lut.bit_indices[i], input_fmt.frac_bits);
                    product *= velocity_factor(std::ldexp(1.0, e));
                }
            }
            Fx entry = quantize(product, entry_fmt, mode);
            if (entry.code == 0) entry.code = 1;
            lut.entries.push_back(entry);
        }
        luts.push_back(std::move(lut));
    }
    return luts;
}

double grouped_factor_product(std::int64_t magnitude_code, int frac_bits,
                              const std::vector<BitGroup>& groups) {
    double total = 1.0;
    for (const auto& g : groups) {
        double group = 1.0;
        for (int i : g) {
            if ((magnitude_code >> i) & 1) group *= velocity_factor(std::ldexp(1.0, bit_weight_exponent(i, frac_bits)));
        }
        total *= group;
    }
    return total;
}

std::string export_memh(const VelocityLut& lut) {
    const int digits = (lut.entry_fmt.width() + 3) / 4;
    std::string out;
    out.reserve(lut.entries.size() * static_cast<std::size_t>(digits + 1));
    char buf[32];
    for (const Fx& e : lut.entries) {
        std::snprintf(buf, sizeof buf, "%0*llx\n", digits, static_cast<unsigned long long>(e.code));
        out += buf;
    }
    return out;
}

std::vector<std::int64_t> parse_memh(std::string_view text) {
    std::vector<std::int64_t> codes;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::int64_t v = 0;
        for (char c : line) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else throw ConfigError("memh line " + std::to_string(line_no) + ": bad hex digit");
            if (v > (INT64_MAX >> 4)) {
                throw ConfigError("memh line " + std::to_string(line_no) + ": word too wide");
            }
            v = (v << 4) | d;
        }
        codes.push_back(v);
    }
    return codes;
}

std::string export_manifest(const std::vector<VelocityLut>& luts) {
    std::ostringstream os;
    for (std::size_t j = 0; j < luts.size(); ++j) {
        os << j << ' ';
        for (std::size_t i = 0; i < luts[j].bit_indices.size(); ++i) {
            if (i) os << ',';
            os << luts[j].bit_indices[i];
        }
        os << ' ' << luts[j].entry_fmt.to_string() << '\n';
    }
    return os.str();
}

}  // namespace vftanh
