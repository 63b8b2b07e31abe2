#include "doctest.h"

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace hbie_cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::initializer_list<const char*> args)
{
    std::vector<const char*> argv{"hbie"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content)
{
    const auto p = std::filesystem::temp_directory_path() / ("hbie_test_" + name);
    std::ofstream(p) << content;
    return p.string();
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        v.push_back(l);
    return v;
}

} // namespace

TEST_CASE("a bare --k prints only the header")
{
    const Run r = run({"sweep", "--k"});
    CHECK(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE_FALSE(l.empty());
    CHECK(l[0] == "k,eta_model,geometry,N,norm_A,norm_Ainv,cond,alpha_coercivity,gmres_iters_plus,"
                  "gmres_iters_minus,dtn_ratio,ntd_ratio,resA,resB,error");
    for (std::size_t i = 1; i < l.size(); ++i)
        CHECK(l[i].rfind("#", 0) == 0);
}

TEST_CASE("bad input exits with 2")
{
    CHECK(run({"sweep", "--geometry", "blob"}).code == 2);
    CHECK(run({"sweep", "--k", "-3"}).code == 2);
    CHECK(run({"sweep", "--N", "17"}).code == 2);
    CHECK(run({"sweep", "--geometry", "kite", "--N", "modes"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"sweep", "--format", "xml", "--k", "5"}).code == 2);
    CHECK(run({"billiards", "--obstacle", "circle:1", "--obstacle", "circle:1@0.5,0"}).code == 2);
    const std::string bad = temp_file("bad.json", R"({"k": [5], "colour": "red"})");
    CHECK(run({"sweep", "--config", bad.c_str()}).code == 2);
    const std::string broken = temp_file("broken.json", "{ not json");
    CHECK(run({"sweep", "--config", broken.c_str()}).code == 2);
    CHECK(run({"sweep", "--config", "/nonexistent/hbie.json"}).code == 2);
}

TEST_CASE("help exits with 0")
{
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"sweep", "--help"}).code == 0);
}

TEST_CASE("config values apply and flags override them")
{
    const std::string cfg = temp_file("sweep.json", R"({"command": "sweep", "k": [5, 10], "eta_a": 2.0, "format": "json"})");
    const Run a = run({"sweep", "--config", cfg.c_str()});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["command"] == "sweep");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][1]["k"] == 10.0);
    CHECK(j["rows"][0]["eta_model"] == "a=2;b=0");

    const Run b = run({"sweep", "--config", cfg.c_str(), "--k", "7", "--eta-a", "1", "--format", "csv"});
    REQUIRE(b.code == 0);
    const auto l = lines(b.out);
    REQUIRE(l.size() >= 2);
    CHECK(l[1].rfind("7.000000000000e+00,a=1;b=0,circle,", 0) == 0);
}

TEST_CASE("JSON output has the table schema")
{
    const Run r = run({"sharpness", "--k", "20", "40", "80", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["columns"] == nlohmann::json({"k", "dtn_ratio", "ntd_ratio", "dtn_half", "ntd_half", "error"}));
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0]["error"].is_null());
    // dtn is O(1); ntd grows like k^{1/3}
    CHECK(std::abs(j["summary"]["fits"]["dtn_ratio"]["exponent"].get<double>()) < 0.05);
    CHECK(std::abs(j["summary"]["fits"]["ntd_ratio"]["exponent"].get<double>() - 1.0 / 3.0) < 0.1);
}

TEST_CASE("floats print with 12 significant digits")
{
    const Run r = run({"sharpness", "--k", "20"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() >= 2);
    const std::regex row(R"(^2\.000000000000e\+01(,-?\d\.\d{12}e[+-]\d{2}){4},$)");
    CHECK(std::regex_match(l[1], row));
}

TEST_CASE("mode path sweep")
{
    const Run r = run({"sweep", "--k", "20", "40", "80", "--residuals", "--coercivity", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["summary"]["path"] == "modes");
    for (const auto& row : j["rows"]) {
        CHECK(row["N"].get<int>() % 2 == 1);
        CHECK(row["resA"].get<double>() < 1e-10);
        CHECK(row["alpha_coercivity"].get<double>() > 0.0);
    }
    // ntd_ratio is already divided by k^{1/3}
    CHECK(std::abs(j["summary"]["fits"]["ntd_ratio"]["exponent"].get<double>()) < 0.1);
    CHECK(std::abs(j["summary"]["fits"]["dtn_ratio"]["exponent"].get<double>()) < 0.05);
}

TEST_CASE("reruns are byte identical")
{
    const Run a = run({"billiards", "--obstacle", "circle:1@2,0", "--obstacle", "circle:1@-2,0", "--samples", "1000"});
    const Run b = run({"billiards", "--obstacle", "circle:1@2,0", "--obstacle", "circle:1@-2,0", "--samples", "1000"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const Run c = run({"sweep", "--geometry", "kite", "--k", "3", "4", "--N", "64", "--gmres"});
    const Run d = run({"sweep", "--geometry", "kite", "--k", "3", "4", "--N", "64", "--gmres"});
    CHECK(c.code == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("billiards obstacles from a config file")
{
    const std::string cfg = temp_file("bill.json", R"({"obstacles": [{"family": "kite"},
        {"polygon": [[3, -0.5], [4, -0.5], [4, 0.5], [3, 0.5]]}], "samples": 1000, "R": 6, "format": "json"})");
    const Run r = run({"billiards", "--config", cfg.c_str()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["summary"]["obstacles"] == 2);
    CHECK(j["rows"][0]["samples"] == 1000);
}

TEST_CASE("a run whose rows all fail exits with 3")
{
    const Run r = run({"sweep", "--geometry", "kite", "--k", "5", "--N", "16384"});
    CHECK(r.code == 3);
    const auto l = lines(r.out);
    REQUIRE(l.size() >= 2);
    CHECK(l[1].find("16384") != std::string::npos);
}

TEST_CASE("impedance poles stay below the real axis")
{
    const Run r = run({"poles", "--re-max", "15", "--n-max", "20", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["summary"]["upper_half_count"] == 0);
    CHECK(j["summary"]["strip_width"].get<double>() > 0.0);
    CHECK(j["summary"]["origin_degenerate"] == false);
    for (const auto& row : j["rows"])
        CHECK(row["k_im"].get<double>() < 0.0);
    const Run z = run({"poles", "--b", "0", "--re-max", "10", "--n-max", "10", "--format", "json"});
    CHECK(nlohmann::json::parse(z.out)["summary"]["origin_degenerate"] == true);
}

TEST_CASE("mie compares the CFIE far field")
{
    const Run r = run({"mie", "--k", "5", "--N", "128", "--angles", "36", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 36);
    CHECK(j["summary"]["max_relative_error"].get<double>() < 1e-8);
}

TEST_CASE("gmres-bench and coercivity")
{
    const Run g = run({"gmres-bench", "--k", "10", "--N", "128", "--format", "json"});
    REQUIRE(g.code == 0);
    const auto jg = nlohmann::json::parse(g.out);
    REQUIRE(jg["rows"].size() == 2);
    for (const auto& row : jg["rows"])
        CHECK(row["converged"] == true);
    const Run c = run({"coercivity", "--k", "5", "10", "--format", "json"});
    REQUIRE(c.code == 0);
    for (const auto& row : nlohmann::json::parse(c.out)["rows"])
        CHECK(row["alpha_coercivity"].get<double>() > 0.0);
}

TEST_CASE("out writes to a file")
{
    const auto p = (std::filesystem::temp_directory_path() / "hbie_test_out.csv").string();
    const Run r = run({"sharpness", "--k", "20", "--out", p.c_str()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    CHECK(first == "k,dtn_ratio,ntd_ratio,dtn_half,ntd_half,error");
}

TEST_CASE("N rule")
{
    CHECK(matrix_size(5) == 256);
    CHECK(matrix_size(40.05) == 402);
    CHECK(NRule::parse("auto").kind == NRule::Kind::Auto);
    CHECK(NRule::parse("512").fixed == 512);
    CHECK_THROWS_AS(NRule::parse("15"), ConfigError);
    CHECK_THROWS_AS(NRule::parse("8"), ConfigError);
    CHECK(default_k_grid().size() == 7);
    CHECK(default_k_grid().back() == 1280.0);
}
