#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "levy_euler/cli.hpp"
#include "levy_euler/config.hpp"

using namespace levy_euler;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
fs::path const kConfigs = LEVY_EULER_CONFIG_DIR;

fs::path scratch(std::string const& name)
{
    auto const p = fs::temp_directory_path() / ("levy_euler_cli_" + name);
    fs::remove_all(p);
    return p;
}

int levy_euler_cli(std::string const& args)
{
    std::string const cmd = std::string(LEVY_EULER_CLI) + " " + args + " > /dev/null 2>&1";
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(fs::path const& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(fs::path const& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
        {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}
}  // namespace

TEST_CASE("format_double round-trips with 17 significant digits")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125})
    {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("rate in exactness mode passes for constant coefficients")
{
    auto const out = scratch("exact");
    CHECK(levy_euler_cli("rate --config " + (kConfigs / "exactness.json").string() + " --out "
                         + out.string())
          == 0);
    auto const pts = read_csv(out / "points.csv");
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == std::vector<std::string>{"delta", "estimate", "stderr", "n_paths", "excluded"});
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        CHECK(std::abs(std::stod(pts[i][1])) <= 3 * std::stod(pts[i][2]));
    }
    CHECK(std::stod(pts[1][0]) > std::stod(pts[2][0]));
    auto const rep = read_csv(out / "report.csv");
    REQUIRE(rep.size() == 2);
    CHECK(rep[0] == std::vector<std::string>{"fitted_slope", "ci_lo", "ci_hi", "theory_exponent",
                                             "theory_label", "pass"});
    CHECK(rep[1].back() == "true");
}

TEST_CASE("meta.json echoes a configuration that round-trips")
{
    auto const out = scratch("meta");
    REQUIRE(levy_euler_cli("rate --config " + (kConfigs / "exactness.json").string() + " --out "
                           + out.string())
            == 0);
    auto const meta = read_json(out / "meta.json");
    CHECK(meta["subcommand"] == "rate");
    CHECK(meta["seed"] == 11);
    CHECK(meta.contains("versions"));
    CHECK(meta.contains("wall_time_s"));
    auto const again = config_to_json(config_from_json(meta["config"]));
    CHECK(again == meta["config"]);
}

TEST_CASE("points.csv is byte-identical across worker counts")
{
    std::string first;
    for (int w : {1, 3})
    {
        auto const out = scratch("workers" + std::to_string(w));
        REQUIRE(levy_euler_cli("rate --config " + (kConfigs / "exactness.json").string()
                               + " --out " + out.string() + " --workers " + std::to_string(w))
                == 0);
        auto const s = slurp(out / "points.csv");
        if (first.empty())
        {
            first = s;
        }
        CHECK(s == first);
    }
}

TEST_CASE("seed precedence: config < environment < flag")
{
    auto const cfg = (kConfigs / "exactness.json").string();
    auto const out = scratch("seed");
    ::setenv("LEVY_EULER_SEED", "99", 1);
    REQUIRE(levy_euler_cli("rate --config " + cfg + " --out " + out.string()) == 0);
    CHECK(read_json(out / "meta.json")["seed"] == 99);
    REQUIRE(levy_euler_cli("rate --config " + cfg + " --out " + out.string() + " --seed 5") == 0);
    CHECK(read_json(out / "meta.json")["seed"] == 5);
    ::unsetenv("LEVY_EULER_SEED");
    ::setenv("LEVY_EULER_WORKERS", "2", 1);
    REQUIRE(levy_euler_cli("rate --config " + cfg + " --out " + out.string()) == 0);
    CHECK(read_json(out / "meta.json")["workers"] == 2);
    ::unsetenv("LEVY_EULER_WORKERS");
}

TEST_CASE("sample-stable at alpha = 1 has quartiles -1 and +1")
{
    auto const out = scratch("sample");
    REQUIRE(levy_euler_cli("sample-stable --config " + (kConfigs / "sample_cauchy.json").string()
                           + " --out " + out.string())
            == 0);
    auto const m = read_json(out / "moments.json");
    double const n = m["n"].get<double>();
    double const se = std::sqrt(0.1875 / n) * 2.0 * std::numbers::pi;
    auto const& c = m["components"][0];
    CHECK(std::abs(c["q25"].get<double>() + 1.0) < 4 * se);
    CHECK(std::abs(c["q75"].get<double>() - 1.0) < 4 * se);
    CHECK(read_csv(out / "samples.csv").size() == static_cast<std::size_t>(n) + 1);
}

TEST_CASE("invalid configurations produce error.json and exit 2")
{
    auto const bad = scratch("bad.json");
    json j = read_json(kConfigs / "exactness.json");
    j["model"]["alpha"] = 0.5;
    j["z"]["mu"] = 0.5;
    j["test"]["beta"] = 0.5;
    std::ofstream(bad) << j.dump();
    auto const out = scratch("bad");
    CHECK(levy_euler_cli("rate --config " + bad.string() + " --out " + out.string()) == 2);
    auto const err = read_json(out / "error.json");
    CHECK(err["type"] == "config");
    bool named = false;
    for (auto const& v : err["violations"])
    {
        named = named || v.get<std::string>().find("a must be zero for α ∈ (0,1)") != std::string::npos;
    }
    CHECK(named);

    CHECK(levy_euler_cli("rate --config " + (kConfigs / "missing.json").string() + " --out "
                         + out.string())
          == 2);
    CHECK(levy_euler_cli("transmogrify --config " + bad.string() + " --out " + out.string()) != 0);
}
