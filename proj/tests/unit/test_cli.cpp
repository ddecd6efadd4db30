#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catscatter/cli.hpp"

namespace fs = std::filesystem;
using catscatter::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "catscatter-cli-test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("wigner export contains the odd-cat origin value")
{
    const fs::path path = scratch("w.csv");
    const auto r = call({"wigner", "--state", "odd-cat", "--sigma-perp", "2", "--r0", "2", "--grid", "128", "--out", path.string()});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(slurp(path));
    CHECK(rows.front() == std::vector<std::string>{"x", "px", "w"});
    CHECK(rows.size() == 1 + 129 * 129);
    bool found = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::stod(rows[i][0]) == 0.0 && std::stod(rows[i][1]) == 0.0) {
            found = true;
            CHECK(std::abs(std::stod(rows[i][2]) + 0.1013211836) < 1e-9);
        }
    }
    CHECK(found);
    CHECK(fs::exists(path.string() + ".run.json"));
}

TEST_CASE("scatter: Gaussian phi grid is flat")
{
    const auto r = call({"scatter", "--state", "gaussian", "--sigma-perp", "2", "--pi", "10", "--wide", "--theta", "10", "--phi-grid", "16"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 17);
    CHECK(rows[0] == std::vector<std::string>{"theta_deg", "phi_deg", "dnu", "dsigma", "err_est", "method"});
    const double first = std::stod(rows[1][3]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][3]) - first) <= 1e-8 * first);
        CHECK(rows[i][2] == "nan");
        CHECK(rows[i][5] == "quadrature2d");
    }
    CHECK(r.err.find("warning: sigma_z << sigma_perp^2 p_i") != std::string::npos);
}

TEST_CASE("scatter: finite target reports both dnu and dsigma")
{
    const auto r = call({"scatter", "--state", "odd-cat", "--r0", "2", "--sigma-t", "20", "--theta", "5:15:3", "--phi", "0:90:2", "--ne", "3"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[1][0] == "5");
    CHECK(rows[6][1] == "90");
    const double dnu = std::stod(rows[1][2]);
    const double dsigma = std::stod(rows[1][3]);
    CHECK(dsigma == doctest::Approx(2.0 * 3.141592653589793 * 404.0 * dnu / 3.0).epsilon(1e-14));
}

TEST_CASE("validate passes and is deterministic")
{
    const auto a = call({"validate"});
    const auto b = call({"validate"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("FAIL") == std::string::npos);
    CHECK(a.out.find("closed_form vs quadrature2d") != std::string::npos);
}

TEST_CASE("sidecar round trip is bit identical")
{
    const fs::path first = scratch("sweep1.csv");
    const fs::path second = scratch("sweep2.csv");
    const auto r = call({"sweep", "--state", "even-cat", "--axis", "r0", "--values", "2:6:5", "--out", first.string(), "--ev", "1.36"});
    REQUIRE(r.code == 0);
    const auto again = call({"sweep", "--config", first.string() + ".run.json", "--out", second.string()});
    REQUIRE(again.code == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK(parse_csv(slurp(first)).size() == 6);

    const fs::path s1 = scratch("scatter1.json");
    const fs::path s2 = scratch("scatter2.json");
    REQUIRE(call({"scatter", "--state", "even-cat", "--r0", "3", "--theta", "2:30:4", "--format", "json", "--out", s1.string()}).code == 0);
    REQUIRE(call({"scatter", "--config", s1.string() + ".run.json", "--out", s2.string()}).code == 0);
    const std::string j1 = slurp(s1);
    const std::string j2 = slurp(s2);
    // The echoed config differs only in the output path.
    CHECK(j1.substr(j1.find("\"rows\"")) == j2.substr(j2.find("\"rows\"")));
}

TEST_CASE("asymmetry output")
{
    const auto r = call({"asymmetry", "--state", "odd-cat", "--r0", "2", "--theta", "10"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"axis_value", "theta_deg", "A", "metric"});
    CHECK(std::abs(std::stod(rows[1][2])) > 0.03);
    CHECK(rows[1][3] == "para-perp");

    const auto j = call({"asymmetry", "--state", "even-cat", "--r0", "4", "--metric", "minmax", "--format", "json"});
    REQUIRE(j.code == 0);
    CHECK(j.out.find("\"phi_scan_deg_dnu\"") != std::string::npos);
    CHECK(j.out.find("\"minmax\"") != std::string::npos);
}

TEST_CASE("17 significant digits")
{
    const auto r = call({"scatter", "--state", "odd-cat", "--r0", "2", "--theta", "10"});
    const auto rows = parse_csv(r.out);
    const std::string dsigma = rows[1][3];
    std::size_t digits = 0;
    for (char c : dsigma.substr(0, dsigma.find('e'))) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
    CHECK(digits >= 16);
}

TEST_CASE("input errors exit with 1")
{
    CHECK(call({}).code == 1);
    CHECK(call({"scatter", "--ev", "1.4", "--pi", "10"}).code == 1);
    CHECK(call({"scatter", "--wide", "--sigma-t", "20"}).code == 1);
    CHECK(call({"scatter", "--state", "cat"}).code == 1);
    CHECK(call({"scatter", "--theta", "1:2"}).code == 1);
    CHECK(call({"scatter", "--sigma-perp", "abc"}).code == 1);
    CHECK(call({"scatter", "--sigma-perp", "-2"}).code == 1);
    CHECK(call({"scatter", "--format", "xml"}).code == 1);
    CHECK(call({"asymmetry", "--metric", "rms"}).code == 1);
    CHECK(call({"sweep", "--axis", "width", "--values", "1,2"}).code == 1);
    CHECK(call({"wigner", "--config", "/nonexistent/run.json"}).code == 1);
    const auto r = call({"scatter", "--state", "odd-cat", "--r0", "1e-6"});
    CHECK(r.code == 1);
    CHECK(r.err.find("InvalidCatSeparation") != std::string::npos);
}

TEST_CASE("energy flag")
{
    const auto r = call({"scatter", "--ev", "1.3605693122994", "--theta", "10", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"p_i\": 10.0") != std::string::npos);
}
