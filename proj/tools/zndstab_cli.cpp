// zndstab command-line front end.
//
//   zndstab profile --config cfg.json --out profile.csv
//   zndstab evans   --config cfg.json --lambda 1+1i --method neutral
//   zndstab contour --config cfg.json --radius 2 --out samples.csv
//   zndstab roots   --config cfg.json --seed 0.12+0.88i --param EA --values 300,301,302
//   zndstab bench   --table 1 --out table1.csv
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical error, 4 bench trend failure.

#include "zndstab/errors.hpp"
#include "zndstab/evans.hpp"
#include "zndstab/io.hpp"
#include "zndstab/modelbench.hpp"
#include "zndstab/stability.hpp"
#include "zndstab/znd.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace zndstab;

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::string method = "neutral";
    double tol = 0.0;
    double M = 0.0;
    unsigned jobs = 1;
};

struct Run {
    std::string command_line;
    std::optional<double> env_tol;
};

Run g_run;

double pick_tol(double flag, const GasWaveConfig* config)
{
    if (flag > 0.0)
        return flag;
    if (g_run.env_tol)
        return *g_run.env_tol;
    return config ? config->tol : 1e-5;
}

Method pick_method(const std::string& name)
{
    auto m = parse_method(name);
    if (!m)
        throw ConfigError("--method", "unknown method '" + name + "' (neutral, erpenbeck, lee-stewart)");
    return *m;
}

RunManifest make_manifest(const GasWaveConfig* config, double rel_tol, double abs_tol, double M)
{
    RunManifest m;
    m.command_line = g_run.command_line;
    m.config_hash = config ? config_hash(*config) : "";
    m.rel_tol = rel_tol;
    m.abs_tol = abs_tol;
    m.M = M;
    m.timestamp = utc_timestamp();
    m.tol_from_environment = g_run.env_tol;
    return m;
}

void finish_manifest(RunManifest& m, const std::string& out)
{
    m.outputs.push_back(std::filesystem::path(out).filename().string());
    write_json(manifest_path_for(out), m.to_json());
}

std::string manifest_ref(const std::string& out)
{
    return "manifest: " + std::filesystem::path(manifest_path_for(out)).filename().string();
}

void emit_csv(const std::string& out, const CsvTable& table, RunManifest& manifest)
{
    if (out.empty()) {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            std::cout << (i ? "," : "") << table.header[i];
        std::cout << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                std::cout << (i ? "," : "") << format_double(row[i]);
            std::cout << '\n';
        }
        return;
    }
    write_csv(out, table, manifest_ref(out));
    finish_manifest(manifest, out);
}

void emit_json(const std::string& out, json doc, RunManifest& manifest)
{
    if (out.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    doc["manifest"] = std::filesystem::path(manifest_path_for(out)).filename().string();
    write_json(out, doc);
    finish_manifest(manifest, out);
}

int cmd_profile(const Common& c, std::size_t points)
{
    const GasWaveConfig cfg = load_config(c.config_path);
    const SteadyWave wave = build_wave(cfg);
    const double depth = c.M > 0.0 ? c.M : (wave.M_y() > 0.0 ? wave.M_y() : wave.default_M());
    if (points < 2)
        throw ConfigError("--points", "must be at least 2");

    std::vector<double> ys{0.0};
    const double lo = std::log10(depth * 1e-6), hi = std::log10(depth);
    for (std::size_t k = 0; k + 1 < points; ++k)
        ys.push_back(-std::pow(10.0, lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 2)));
    ys.back() = -depth;
    std::vector<double> tail(ys.begin() + 1, ys.end());
    const std::vector<double> xs = wave.x_of_y(tail);

    CsvTable t;
    t.header = {"y", "x", "rho", "u", "e", "Y", "p", "T"};
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const StateW s = wave.profile_at(ys[i]);
        const Thermo th = thermo(s, cfg);
        t.rows.push_back({ys[i], i ? xs[i - 1] : 0.0, s.rho, s.u, s.e, s.Y[0], th.p, th.T});
    }
    RunManifest m = make_manifest(&cfg, 0.0, 0.0, depth);
    emit_csv(c.out, t, m);
    return 0;
}

int cmd_evans(const Common& c, const std::string& lambda_text, const std::string& dump_G, std::size_t grid)
{
    const GasWaveConfig cfg = load_config(c.config_path);
    const SteadyWave wave = build_wave(cfg);
    const Method method = pick_method(c.method);
    const cplx lambda = parse_lambda(lambda_text);
    if (lambda.real() < 0.0)
        throw DomainError("Re lambda must be non-negative");
    EvansOptions eo;
    eo.tol = pick_tol(c.tol, &cfg);
    eo.M = c.M;
    const EvansResult r = evaluate_evans(wave, lambda, method, eo);

    if (!dump_G.empty()) {
        CsvTable t;
        t.header = {"y"};
        const std::size_t n = 3 + cfg.species();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                t.header.push_back("re_G" + std::to_string(i + 1) + std::to_string(j + 1));
                t.header.push_back("im_G" + std::to_string(i + 1) + std::to_string(j + 1));
            }
        for (std::size_t k = 0; k < grid; ++k) {
            const double y = -r.M * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(grid - 1, 1));
            const CMatrix G = coefficient_G(wave, lambda, y);
            std::vector<double> row{y};
            for (Eigen::Index i = 0; i < G.rows(); ++i)
                for (Eigen::Index j = 0; j < G.cols(); ++j) {
                    row.push_back(G(i, j).real());
                    row.push_back(G(i, j).imag());
                }
            t.rows.push_back(std::move(row));
        }
        RunManifest gm = make_manifest(&cfg, eo.tol, eo.tol, r.M);
        write_csv(dump_G, t, manifest_ref(dump_G));
        finish_manifest(gm, dump_G);
    }

    RunManifest m = make_manifest(&cfg, eo.tol, eo.tol, r.M);
    m.stats.push_back(to_json(r.stats));
    emit_json(c.out, to_json(r), m);
    return 0;
}

int cmd_contour(const Common& c, double radius, std::size_t nodes, const std::string& report_path)
{
    const GasWaveConfig cfg = load_config(c.config_path);
    const SteadyWave wave = build_wave(cfg);
    const Method method = pick_method(c.method);
    EvansOptions eo;
    eo.tol = pick_tol(c.tol, &cfg);
    eo.M = c.M;
    CountOptions co;
    co.initial_nodes = nodes;
    co.refine.jobs = c.jobs;
    const WindingReport rep = count_unstable(wave, radius, method, eo, co);

    CsvTable t;
    t.header = {"re_lambda", "im_lambda", "re_D", "im_D"};
    for (std::size_t i = 0; i < rep.samples.size(); ++i)
        t.rows.push_back({rep.samples.nodes[i].real(), rep.samples.nodes[i].imag(), rep.samples.values[i].real(),
                          rep.samples.values[i].imag()});
    const double M = eo.M > 0.0 ? eo.M : wave.default_M();
    RunManifest m = make_manifest(&cfg, eo.tol, eo.tol, M);
    json report = to_json(rep);
    if (!c.out.empty()) {
        write_csv(c.out, t, manifest_ref(c.out));
        m.outputs.push_back(std::filesystem::path(c.out).filename().string());
        const std::string rpath = report_path.empty() ? c.out + ".report.json" : report_path;
        report["manifest"] = std::filesystem::path(manifest_path_for(c.out)).filename().string();
        report["samples_csv"] = std::filesystem::path(c.out).filename().string();
        write_json(rpath, report);
        m.outputs.push_back(std::filesystem::path(rpath).filename().string());
        write_json(manifest_path_for(c.out), m.to_json());
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> out;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        // a:b:n
        std::stringstream ss(text);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, ':'))
            parts.push_back(part);
        if (parts.size() != 3)
            throw ConfigError("--values", "range must be start:stop:count");
        const double a = std::stod(parts[0]), b = std::stod(parts[1]);
        const int n = std::stoi(parts[2]);
        if (n < 1)
            throw ConfigError("--values", "count must be positive");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        out.push_back(std::stod(part));
    if (out.empty())
        throw ConfigError("--values", "no values given");
    return out;
}

int cmd_roots(const Common& c, const std::string& seed_text, const std::string& param, const std::string& values_text)
{
    const GasWaveConfig cfg = load_config(c.config_path);
    const Method method = pick_method(c.method);
    const cplx seed = parse_lambda(seed_text);
    std::vector<double> values;
    try {
        values = parse_values(values_text);
    } catch (const std::invalid_argument&) {
        throw ConfigError("--values", "cannot parse '" + values_text + "'");
    }
    EvansOptions eo;
    eo.tol = pick_tol(c.tol, &cfg);
    eo.M = c.M;
    const RootTrace trace = sweep_znd_roots(cfg, param, values, seed, method, eo);
    RunManifest m = make_manifest(&cfg, eo.tol, eo.tol, c.M);
    emit_json(c.out, to_json(trace), m);
    if (!trace.complete) {
        std::cerr << "zndstab: " << trace.message << '\n';
        return 3;
    }
    return 0;
}

int cmd_bench(const Common& c, int table, double rel_tol, double abs_tol)
{
    if (table != 1 && table != 2)
        throw ConfigError("--table", "must be 1 or 2");
    BenchOptions bo;
    if (c.tol > 0.0) {
        bo.rel_tol = c.tol;
        bo.abs_tol = c.tol;
    } else if (g_run.env_tol) {
        bo.rel_tol = *g_run.env_tol;
        bo.abs_tol = *g_run.env_tol;
    }
    if (rel_tol > 0.0)
        bo.rel_tol = rel_tol;
    if (abs_tol > 0.0)
        bo.abs_tol = abs_tol;
    if (c.M > 0.0)
        bo.M = c.M;
    bo.jobs = c.jobs;

    const auto rows = reproduce_table(table, bo);
    CsvTable t;
    t.header = {"table", "c", "re_lambda", "im_lambda", "direction", "mesh_points", "paper_count", "ratio_to_paper",
                "overflowed"};
    for (int dir = 0; dir < 2; ++dir) {
        for (const TableEntry& e : rows) {
            const cplx lambda = table_lambdas()[e.lambda_index];
            const std::size_t mine = dir == 0 ? e.forward.mesh_points : e.backward.mesh_points;
            const std::size_t paper = dir == 0 ? e.paper_forward : e.paper_backward;
            const bool overflowed = dir == 0 ? e.forward.stats.overflowed : e.backward.stats.overflowed;
            t.rows.push_back({double(table), table_decays()[e.decay_index], lambda.real(), lambda.imag(), double(dir),
                              double(mine), double(paper), double(mine) / double(paper), double(overflowed)});
        }
    }
    RunManifest m = make_manifest(nullptr, bo.rel_tol, bo.abs_tol, bo.M);
    for (const TableEntry& e : rows) {
        m.stats.push_back(to_json(e.forward.stats));
        m.stats.push_back(to_json(e.backward.stats));
    }
    emit_csv(c.out, t, m);

    bool ok = true;
    for (const TrendCheck& check : check_trends(table, rows, bo)) {
        std::cerr << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
        ok = ok && check.passed;
    }
    return ok ? 0 : 4;
}

void add_common(CLI::App* sub, Common& c, bool config_required)
{
    auto* opt = sub->add_option("--config", c.config_path, "JSON configuration file");
    if (config_required)
        opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output path (stdout when omitted)");
    sub->add_option("--tol", c.tol, "relative and absolute tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--M", c.M, "truncation length in y (default max(M_y, 5/K))")->check(CLI::PositiveNumber);
    sub->add_option("--method", c.method, "neutral | erpenbeck | lee-stewart");
    sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral stability of steady ZND detonations via Evans-Lopatinski shooting"};
    app.set_version_flag("--version", std::string(ZNDSTAB_VERSION));
    app.require_subcommand(1);

    Common common;
    std::size_t points = 200;
    std::string lambda_text, dump_G, report_path, seed_text, param, values_text;
    std::size_t grid = 50, nodes = 32;
    double radius = 1.0;
    int table = 1;
    double rel_tol = 0.0, abs_tol = 0.0;

    auto* profile = app.add_subcommand("profile", "steady profile as CSV (y,x,rho,u,e,Y,p,T)");
    add_common(profile, common, true);
    profile->add_option("--points", points, "number of grid points");

    auto* evans = app.add_subcommand("evans", "evaluate D(lambda)");
    add_common(evans, common, true);
    evans->add_option("--lambda", lambda_text, "e.g. 1+1i or 1,1")->required();
    evans->add_option("--dump-G", dump_G, "write G(lambda, y) on a grid to this CSV");
    evans->add_option("--grid", grid, "grid points for --dump-G");

    auto* contour = app.add_subcommand("contour", "winding number over a right half-disc");
    add_common(contour, common, true);
    contour->add_option("--radius", radius, "semicircle radius")->check(CLI::PositiveNumber);
    contour->add_option("--nodes", nodes, "initial contour nodes")->check(CLI::Range(8, 100000));
    contour->add_option("--report", report_path, "winding report JSON (default <out>.report.json)");

    auto* roots = app.add_subcommand("roots", "follow a root while sweeping one parameter");
    add_common(roots, common, true);
    roots->add_option("--seed", seed_text, "root at the first parameter value")->required();
    roots->add_option("--param", param, "parameter name (EA, q, K, Gamma, ...)")->required();
    roots->add_option("--values", values_text, "comma list or start:stop:count")->required();

    auto* bench = app.add_subcommand("bench", "model-problem mesh-count tables");
    add_common(bench, common, false);
    bench->add_option("--table", table, "1 (factored) or 2 (unfactored)")->required();
    bench->add_option("--rel-tol", rel_tol, "relative tolerance (default 1e-6)");
    bench->add_option("--abs-tol", abs_tol, "absolute tolerance (default 1e-8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    for (int i = 0; i < argc; ++i)
        g_run.command_line += (i ? " " : "") + std::string(argv[i]);

    try {
        g_run.env_tol = tolerance_from_environment();
        if (*profile)
            return cmd_profile(common, points);
        if (*evans)
            return cmd_evans(common, lambda_text, dump_G, grid);
        if (*contour)
            return cmd_contour(common, radius, nodes, report_path);
        if (*roots)
            return cmd_roots(common, seed_text, param, values_text);
        if (*bench)
            return cmd_bench(common, table, rel_tol, abs_tol);
    } catch (const Error& e) {
        std::cerr << "zndstab: " << e.what() << '\n';
        return e.error_class() == ErrorClass::usage ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "zndstab: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
