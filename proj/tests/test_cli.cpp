#include "doctest.h"
#include "support.hpp"

#include "zndstab/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace zndstab;
using zndstab::testing::config_path;
using zndstab::testing::shipped;

namespace fs = std::filesystem;

namespace {

const fs::path& workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("zndstab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string out(const std::string& name)
{
    return (workdir() / name).string();
}

struct Result {
    int code = -1;
    std::string stdout_text;
};

// Runs the CLI with stdout captured and stderr discarded.
Result cli(const std::string& args)
{
    const std::string capture = out("stdout.txt");
    const std::string cmd = std::string("\"") + ZNDSTAB_CLI_PATH + "\" " + args + " > \"" + capture + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

std::string cfg(const char* name)
{
    return "--config \"" + config_path(std::string(name) + ".json") + "\"";
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_comments(const std::string& text)
{
    std::stringstream in(text), kept;
    std::string line;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#')
            kept << line << '\n';
    return kept.str();
}

} // namespace

TEST_CASE("profile")
{
    const std::string p = out("profile.csv");
    REQUIRE(cli("profile " + cfg("default") + " --points 50 --out \"" + p + "\"").code == 0);
    const CsvTable t = read_csv(p);
    CHECK(t.header == std::vector<std::string>{"y", "x", "rho", "u", "e", "Y", "p", "T"});
    REQUIRE(t.rows.size() == 50);

    // first row is the shock state: mass, momentum and energy fluxes match upstream
    const GasWaveConfig c = shipped("default");
    const UpstreamState& up = c.upstream;
    const double rho = t.rows[0][2], u = t.rows[0][3], e = t.rows[0][4], p0 = t.rows[0][6];
    const double pu = c.Gamma * up.rho * up.e;
    CHECK(t.rows[0][0] == 0.0);
    CHECK(rho * u == doctest::Approx(up.rho * up.u).epsilon(1e-13));
    CHECK(rho * u * u + p0 == doctest::Approx(up.rho * up.u * up.u + pu).epsilon(1e-13));
    CHECK(rho * u * (e + u * u / 2) + p0 * u ==
          doctest::Approx(up.rho * up.u * (up.e + up.u * up.u / 2) + pu * up.u).epsilon(1e-13));
    CHECK(rho > up.rho);
    CHECK(t.rows[0][5] == c.Y0[0]);
    for (const auto& row : t.rows) {
        const double y = row[0];
        CHECK(row[5] == doctest::Approx(std::exp(c.K(0, 0) * y) * c.Y0[0]).epsilon(1e-12));
        CHECK(row[6] == doctest::Approx(c.Gamma * row[2] * row[4]).epsilon(1e-12));
        CHECK(row[1] <= 0.0);
    }
    CHECK(fs::exists(manifest_path_for(p)));
    const json m = read_json(manifest_path_for(p));
    CHECK(m["config_hash"] == config_hash(c));
    CHECK(m["outputs"][0] == "profile.csv");
}

TEST_CASE("evans")
{
    const Result r = cli("evans " + cfg("unstable_ls") + " --lambda 1+1i --tol 1e-10");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.stdout_text);
    const cplx D(j["D"][0].get<double>(), j["D"][1].get<double>());
    CHECK(zndstab::testing::rel(D, cplx(-151.24948417257423, -282.3636463658566)) < 1e-8);
    CHECK(j["method"] == "neutral");

    for (const char* m : {"erpenbeck", "lee-stewart"}) {
        const Result e = cli("evans " + cfg("unstable_ls") + " --lambda 1,1 --tol 1e-10 --method " + m);
        REQUIRE(e.code == 0);
        const json k = json::parse(e.stdout_text);
        const cplx Dc(k["D_canonical"][0].get<double>(), k["D_canonical"][1].get<double>());
        CHECK(zndstab::testing::rel(Dc, D) < 1e-7);
    }

    const std::string o = out("evans.json"), g = out("G.csv");
    REQUIRE(cli("evans " + cfg("default") + " --lambda 0.5 --out \"" + o + "\" --dump-G \"" + g + "\" --grid 7").code ==
            0);
    CHECK(read_json(o)["manifest"] == "evans.json.manifest.json");
    CHECK(fs::exists(manifest_path_for(o)));
    const CsvTable G = read_csv(g);
    CHECK(G.rows.size() == 7);
    CHECK(G.header.size() == 1 + 2 * 16);
}

TEST_CASE("contour")
{
    const std::string o = out("samples.csv");
    const Result r = cli("contour " + cfg("unstable_ls") + " --radius 3 --out \"" + o + "\"");
    REQUIRE(r.code == 0);
    const json rep = json::parse(r.stdout_text);
    CHECK(rep["winding"] == 2);
    const CsvTable t = read_csv(o);
    CHECK(t.rows.size() == rep["n_samples"].get<std::size_t>());
    CHECK(fs::exists(o + ".report.json"));
    const json m = read_json(manifest_path_for(o));
    CHECK(m["outputs"].size() == 2);
}

TEST_CASE("roots")
{
    const Result r = cli("roots " + cfg("unstable_ls") + " --seed 0.12+0.88i --param EA --values 300,299 --tol 1e-8");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.stdout_text);
    CHECK(j["complete"] == true);
    CHECK(j["roots"].size() == 2);
    CHECK(std::abs(j["roots"][0][0].get<double>() - 0.12532684763489) < 1e-7);
    CHECK(cli("roots " + cfg("unstable_ls") + " --seed 0.1+0.9i --param EA --values 300:290:3").code == 0);
    CHECK(cli("roots " + cfg("unstable_ls") + " --seed 0.1+0.9i --param EA --values abc").code == 2);
    CHECK(cli("roots " + cfg("unstable_ls") + " --seed 0.1+0.9i --param nope --values 1").code == 2);
}

TEST_CASE("bench")
{
    const std::string o = out("table1.csv");
    REQUIRE(cli("bench --table 1 --jobs 4 --out \"" + o + "\"").code == 0);
    const CsvTable t = read_csv(o);
    CHECK(t.rows.size() == 66);
    CHECK(t.header.back() == "overflowed");
    for (const auto& row : t.rows)
        CHECK(row[7] == doctest::Approx(row[5] / row[6]));
    const json m = read_json(manifest_path_for(o));
    CHECK(m["rel_tol"] == 1e-6);
    CHECK(m["abs_tol"] == 1e-8);
    CHECK(m["stats"].size() == 66);

    CHECK(cli("bench --table 2 --jobs 4").code == 0);
    // loose tolerances break the published trends
    CHECK(cli("bench --table 1 --tol 1e-3").code == 4);
}

TEST_CASE("byte-identical reruns")
{
    const std::string a = out("rerun_a.csv"), b = out("rerun_b.csv");
    REQUIRE(cli("contour " + cfg("default") + " --radius 2 --jobs 3 --out \"" + a + "\"").code == 0);
    REQUIRE(cli("contour " + cfg("default") + " --radius 2 --jobs 1 --out \"" + b + "\"").code == 0);
    // only the manifest reference line differs
    CHECK(strip_comments(slurp(a)) == strip_comments(slurp(b)));

    const std::string c = out("bench_a.csv"), d = out("bench_b.csv");
    REQUIRE(cli("bench --table 2 --out \"" + c + "\"").code == 0);
    REQUIRE(cli("bench --table 2 --jobs 4 --out \"" + d + "\"").code == 0);
    CHECK(strip_comments(slurp(c)) == strip_comments(slurp(d)));
}

TEST_CASE("environment tolerance")
{
    const std::string o = out("env.json");
    ::setenv("ZNDSTAB_TOL", "1e-9", 1);
    const int code = cli("evans " + cfg("default") + " --lambda 1+1i --out \"" + o + "\"").code;
    ::setenv("ZNDSTAB_TOL", "bogus", 1);
    const int bad = cli("evans " + cfg("default") + " --lambda 1+1i").code;
    ::unsetenv("ZNDSTAB_TOL");
    CHECK(code == 0);
    const json m = read_json(manifest_path_for(o));
    CHECK(m["tol_from_environment"] == 1e-9);
    CHECK(m["rel_tol"] == 1e-9);
    CHECK(bad == 2);
}

TEST_CASE("exit codes")
{
    CHECK(cli("--version").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("evans " + cfg("default")).code == 2);
    CHECK(cli("evans " + cfg("default") + " --lambda 1 --method shooting").code == 2);
    CHECK(cli("evans --config /nonexistent.json --lambda 1").code == 2);
    CHECK(cli("evans " + cfg("default") + " --lambda 1+x").code == 2);
    CHECK(cli("bench --table 7").code == 2);
    CHECK(cli("evans " + cfg("default") + " --lambda=-1+1i").code == 3);
    CHECK(cli("evans " + cfg("default") + " --lambda 0").code == 3);

    const std::string bad = out("bad_config.json");
    std::ofstream(bad) << R"({"Gamma": -1, "Cv": 1, "q": 1, "EA": 1, "Ti_low": 1, "Ti_high": 2, "K": 1, "Y0": 1,
                             "upstream": {"rho": 1, "u": -5, "e": 1}})";
    CHECK(cli("profile --config \"" + bad + "\"").code == 2);
}
