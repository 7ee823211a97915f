#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "vftanh/cli.hpp"
#include "vftanh/error.hpp"
#include "vftanh/lutgen.hpp"

using namespace vftanh;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"vftanh"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vftanh_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse_format examples") {
    CHECK(cli::parse_format("s3.12") == signed_fmt(3, 12));
    CHECK(cli::parse_format("s.15") == signed_fmt(0, 15));
    CHECK(cli::parse_format("u0.18") == unsigned_fmt(0, 18));
    CHECK(cli::parse_format("3.5") == signed_fmt(3, 5));
    CHECK_THROWS_AS(cli::parse_format("x9.9"), ConfigError);
    CHECK_THROWS_AS(cli::parse_format("s3"), ConfigError);
    CHECK_THROWS_AS(cli::parse_format("s40.40"), ConfigError);
}

TEST_CASE("gen-lut writes images that parse back to the built tables") {
    const fs::path dir = scratch("genlut");
    const auto r = run_cli({"gen-lut", "--in", "s3.12", "--lut-bits", "18", "--group", "4", "--shuffle", "-o",
                            dir.string().c_str()});
    REQUIRE(r.code == 0);
    const auto luts = build_luts(signed_fmt(3, 12), {4, true}, unsigned_fmt(0, 18));
    for (std::size_t j = 0; j < luts.size(); ++j) {
        const auto codes = parse_memh(slurp(dir / ("lut" + std::to_string(j) + ".memh")));
        REQUIRE(codes.size() == luts[j].size());
        for (std::size_t a = 0; a < codes.size(); ++a) CHECK(codes[a] == luts[j].entries[a].code);
    }
    CHECK(slurp(dir / "manifest.txt") == export_manifest(luts));
    fs::remove_all(dir);
}

TEST_CASE("eval traces one input") {
    const auto zero = run_cli({"eval", "x=0"});
    REQUIRE(zero.code == 0);
    CHECK(zero.out.find("output       0.000000000 code=0x0000") != std::string::npos);

    const auto one = run_cli({"eval", "x=1.0"});
    REQUIRE(one.code == 0);
    CHECK(one.out.find("code=0x617c") != std::string::npos);
    CHECK(one.out.find("nr x3") != std::string::npos);

    const auto big = run_cli({"eval", "x=-7.5"});
    REQUIRE(big.code == 0);
    CHECK(big.out.find("saturated") != std::string::npos);
}

TEST_CASE("table2 prints six rows") {
    const auto r = run_cli({"table2", "--in", "s3.5", "--out", "s.7", "--lut-bits", "10", "--mult-bits", "8",
                            "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
}

TEST_CASE("usage errors exit with 2 and write nothing") {
    const fs::path dir = scratch("bad");
    CHECK(run_cli({"gen-lut", "--in", "x9.9", "-o", dir.string().c_str()}).code == 2);
    CHECK(run_cli({"gen-lut", "--group", "3", "-o", dir.string().c_str()}).code == 2);
    CHECK_FALSE(fs::exists(dir));
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"eval", "x=abc"}).code == 2);
    CHECK(run_cli({"sweep", "--in", "s4.20"}).code == 2);
    CHECK(run_cli({"sweep", "--sub", "threes"}).code == 2);
    const auto bad = run_cli({"sweep", "--in", "x9.9"});
    CHECK(bad.err.find("x9.9") != std::string::npos);
}

TEST_CASE("an unwritable destination exits with 1") {
    const fs::path file = scratch("blocker");
    { std::ofstream(file) << "x"; }
    const fs::path dir = file / "sub";
    CHECK(run_cli({"gen-lut", "-o", dir.string().c_str()}).code == 1);
    fs::remove_all(file);
}

TEST_CASE("reports are deterministic across runs and worker counts") {
    const auto a = run_cli({"sweep", "--format", "csv", "--jobs", "1"});
    const auto b = run_cli({"sweep", "--format", "csv", "--jobs", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("report can go to a file") {
    const fs::path file = scratch("report.csv");
    REQUIRE(run_cli({"sweep", "--format", "csv", "-o", file.string().c_str()}).code == 0);
    const std::string text = slurp(file);
    CHECK(text.rfind("config,max_abs_error", 0) == 0);
    fs::remove_all(file);
}

}  // TEST_SUITE
