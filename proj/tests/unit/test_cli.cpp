#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "common.hpp"
#include "sdarb/io.hpp"

using namespace sdarb;
using namespace sdarb::test;

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run sd_arb(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sdarb_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string ex1 = source_path("data/example1.json");
const std::string ex2 = source_path("data/example2.json");

}  // namespace

TEST_CASE("inspect") {
    const auto r = sd_arb({"inspect", ex1});
    CHECK(r.code == 0);
    CHECK(r.out.find("monotone\tfalse") != std::string::npos);
    CHECK(r.out.find("adequate\tfalse") != std::string::npos);
    CHECK(r.out.find("market_price\t5/3") != std::string::npos);
    CHECK(r.out.find("lower_bound\t7/6") != std::string::npos);

    const auto dir = scratch("inspect");
    const auto flat = dir / "flat.json";
    io::write_file(flat, R"({"atoms": ["1", "2", "4"], "mu": ["1/4", "1/4", "1/2"], "nu": ["1/4", "1/4", "1/2"]})");
    const auto f = sd_arb({"inspect", flat.string(), "--json", (dir / "report.json").string()});
    CHECK(f.code == 0);
    CHECK(f.out.find("monotone\ttrue") != std::string::npos);
    CHECK(f.out.find("market_price\t11/4") != std::string::npos);
    CHECK(f.out.find("lower_bound\t11/4") != std::string::npos);
    const auto report = io::parse_json(io::read_file(dir / "report.json"));
    CHECK(report["bound_chain"] == io::Json::parse(R"(["11/4", "11/4", "11/4", "11/4", "11/4"])"));

    const auto bad = dir / "bad.json";
    io::write_file(bad, "{\"atoms\": [1,\n");
    const auto b = sd_arb({"inspect", bad.string()});
    CHECK(b.code == 1);
    CHECK(b.err.find("line 2") != std::string::npos);
}

TEST_CASE("minimize") {
    const auto ssd = sd_arb({"minimize", ex2, "--order", "ssd"});
    REQUIRE(ssd.code == 0);
    const auto j = io::parse_json(ssd.out);
    CHECK(j["price"] == "8/5");
    CHECK(j["theta"] == io::Json::parse(R"(["2", "3/2"])"));

    const auto dir = scratch("minimize");
    const auto eq = sd_arb({"minimize", ex1, "--order", "eq", "--out", (dir / "eq.json").string()});
    REQUIRE(eq.code == 0);
    const auto je = io::parse_json(io::read_file(dir / "eq.json"));
    CHECK(je["price"] == "5/3");
    CHECK(je["theta"] == io::Json::parse(R"(["1", "2"])"));

    const auto lp_path = dir / "fsd.lp";
    const auto fsd = sd_arb({"minimize", ex1, "--order", "fsd", "--dump-lp", lp_path.string()});
    REQUIRE(fsd.code == 0);
    CHECK(io::parse_json(fsd.out)["price"] == "4/3");
    const auto lp_text = io::read_file(lp_path);
    CHECK(lp_text.find("binary") != std::string::npos);
    CHECK(lp_text.find("2/3") != std::string::npos);

    CHECK(sd_arb({"minimize", ex1, "--order", "third"}).code == 1);
    CHECK(sd_arb({"minimize", (dir / "missing.json").string()}).code == 1);
}

TEST_CASE("ompd") {
    const auto r1 = sd_arb({"ompd", ex1});
    CHECK(r1.code == 0);
    CHECK(r1.out == "# ompd price 4/3\n# atom\tompd\n1\t2\n2\t1\n");
    const auto r2 = sd_arb({"ompd", ex2});
    CHECK(r2.out == "# ompd price 2\n# atom\tompd\n1\t2\n2\t2\n");
}

TEST_CASE("check") {
    const auto p1 = sd_arb({"check", "--suite", "prop1", "--trials", "40", "--seed", "9"});
    CHECK(p1.code == 0);
    CHECK(p1.out == "prop1: 40/40 passed\n");
    CHECK(sd_arb({"check", "--suite", "prop2", "--trials", "20"}).code == 0);
    const auto inadequate = sd_arb({"check", "--suite", "prop2", "--market", ex1});
    CHECK(inadequate.code == 1);
    CHECK(inadequate.err.find("PreconditionInadequate") != std::string::npos);
    CHECK(sd_arb({"check", "--suite", "prop1", "--market", ex2}).code == 0);
}

TEST_CASE("illustrate and synth") {
    const auto dir = scratch("illustrate");
    const auto tables = dir / "tables";
    const auto s = sd_arb({"synth", "--config", source_path("data/synthetic.json"), "--out", tables.string()});
    REQUIRE(s.code == 0);
    const auto out = dir / "study";
    const auto r = sd_arb({"illustrate", (tables / "density.csv").string(), (tables / "kernel_monotone.csv").string(),
                           "--n-list", "5,20", "--out", out.string()});
    REQUIRE(r.code == 0);
    for (const char* f : {"gaps.tsv", "minimizers_n5.tsv", "minimizers_n20.tsv", "ompd_curve.tsv"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(io::read_file(out / "gaps.tsv").rfind("n\trelation\tstatus\tmin_price\tmarket_price\tsup_gap\n", 0) == 0);
    const auto missing = sd_arb({"illustrate", (tables / "density.csv").string(), (tables / "nope.csv").string(),
                                 "--out", out.string()});
    CHECK(missing.code == 1);
}

TEST_CASE("identical inputs give identical bytes") {
    const auto a = sd_arb({"check", "--suite", "lemmas", "--trials", "50", "--seed", "123"});
    const auto b = sd_arb({"check", "--suite", "lemmas", "--trials", "50", "--seed", "123"});
    CHECK(a.out == b.out);
    const auto m1 = sd_arb({"minimize", ex1, "--order", "cv"});
    const auto m2 = sd_arb({"minimize", ex1, "--order", "cv"});
    CHECK(m1.out == m2.out);
}

TEST_CASE("usage errors exit 1") {
    CHECK(sd_arb({}).code == 1);
    CHECK(sd_arb({"frobnicate"}).code == 1);
    CHECK(sd_arb({"check", "--suite", "nope"}).code == 1);
}
