#pragma once

// Configuration parsing, CSV/JSON emission and run manifests.

#include "zndstab/evans.hpp"
#include "zndstab/stability.hpp"
#include "zndstab/znd.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zndstab {

using json = nlohmann::json;

// Keys: Gamma, Cv, q, EA, Ti_low, Ti_high, K, Y0, upstream{rho,u,e}, tol, eps_Y.
// q and Y0 may be numbers or arrays, K a number or an array of rows.
GasWaveConfig config_from_json(const json& doc);
json config_to_json(const GasWaveConfig& config);
GasWaveConfig load_config(const std::string& path);

// 17 significant digits, '.' decimal point.
std::string format_double(double v);

// Accepts "a+bi", "a-bi", "bi", "a" and "a,b".
cplx parse_lambda(const std::string& text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Lines starting with '#' are comments (used for the manifest reference).
void write_csv(const std::string& path, const CsvTable& table, const std::string& comment = "");
CsvTable read_csv(const std::string& path);

json to_json(const SolveStats& stats);
json to_json(const EvansResult& result);
json to_json(const WindingReport& report);
json to_json(const RootTrace& trace);

void write_json(const std::string& path, const json& doc);
json read_json(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const GasWaveConfig& config);

struct RunManifest {
    std::string command_line;
    std::string config_hash;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double M = 0.0;
    std::string timestamp;
    std::string version = ZNDSTAB_VERSION;
    std::optional<double> tol_from_environment;
    std::vector<json> stats;
    std::vector<std::string> outputs;

    json to_json() const;
};

std::string utc_timestamp();

// Path of the manifest that accompanies an output file.
std::string manifest_path_for(const std::string& output_path);

// Tolerance override from ZNDSTAB_TOL, if set and valid.
std::optional<double> tolerance_from_environment();

} // namespace zndstab
