#include "zndstab/io.hpp"
#include "zndstab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace zndstab {

namespace {

double number(const json& doc, const std::string& key, const std::string& field)
{
    if (!doc.contains(key))
        throw ConfigError(field, "missing");
    if (!doc.at(key).is_number())
        throw ConfigError(field, "must be a number");
    return doc.at(key).get<double>();
}

Eigen::VectorXd vector_field(const json& v, const std::string& field)
{
    if (v.is_number())
        return Eigen::VectorXd::Constant(1, v.get<double>());
    if (!v.is_array() || v.empty())
        throw ConfigError(field, "must be a number or a non-empty array of numbers");
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError(field, "entries must be numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

Eigen::MatrixXd matrix_field(const json& v, const std::string& field)
{
    if (v.is_number())
        return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
    if (!v.is_array() || v.empty())
        throw ConfigError(field, "must be a number or an array of rows");
    const std::size_t n = v.size();
    Eigen::MatrixXd out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_array() || v[i].size() != n)
            throw ConfigError(field, "must be a square array of rows");
        for (std::size_t j = 0; j < n; ++j) {
            if (!v[i][j].is_number())
                throw ConfigError(field, "entries must be numbers");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
        }
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v)
{
    if (v.size() == 1)
        return v[0];
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

json complex_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

} // namespace

GasWaveConfig config_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("<root>", "configuration must be a JSON object");
    static const char* known[] = {"Gamma", "Cv", "q", "EA", "Ti_low", "Ti_high", "K", "Y0", "upstream", "tol", "eps_Y"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            throw ConfigError(it.key(), "unknown key");
    }
    GasWaveConfig c;
    c.Gamma = number(doc, "Gamma", "Gamma");
    c.Cv = number(doc, "Cv", "Cv");
    if (!doc.contains("q"))
        throw ConfigError("q", "missing");
    c.q = vector_field(doc["q"], "q");
    c.EA = number(doc, "EA", "EA");
    c.Ti_low = number(doc, "Ti_low", "Ti_low");
    c.Ti_high = number(doc, "Ti_high", "Ti_high");
    if (!doc.contains("K"))
        throw ConfigError("K", "missing");
    c.K = matrix_field(doc["K"], "K");
    if (!doc.contains("Y0"))
        throw ConfigError("Y0", "missing");
    c.Y0 = vector_field(doc["Y0"], "Y0");
    if (!doc.contains("upstream") || !doc["upstream"].is_object())
        throw ConfigError("upstream", "missing or not an object");
    const json& up = doc["upstream"];
    c.upstream.rho = number(up, "rho", "upstream.rho");
    c.upstream.u = number(up, "u", "upstream.u");
    c.upstream.e = number(up, "e", "upstream.e");
    if (doc.contains("tol"))
        c.tol = number(doc, "tol", "tol");
    if (doc.contains("eps_Y"))
        c.eps_Y = number(doc, "eps_Y", "eps_Y");
    c.validate();
    return c;
}

json config_to_json(const GasWaveConfig& c)
{
    json doc;
    doc["Gamma"] = c.Gamma;
    doc["Cv"] = c.Cv;
    doc["q"] = vector_json(c.q);
    doc["EA"] = c.EA;
    doc["Ti_low"] = c.Ti_low;
    doc["Ti_high"] = c.Ti_high;
    if (c.K.size() == 1) {
        doc["K"] = c.K(0, 0);
    } else {
        json rows = json::array();
        for (Eigen::Index i = 0; i < c.K.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < c.K.cols(); ++j)
                row.push_back(c.K(i, j));
            rows.push_back(row);
        }
        doc["K"] = rows;
    }
    doc["Y0"] = vector_json(c.Y0);
    doc["upstream"] = {{"rho", c.upstream.rho}, {"u", c.upstream.u}, {"e", c.upstream.e}};
    doc["tol"] = c.tol;
    doc["eps_Y"] = c.eps_Y;
    return doc;
}

GasWaveConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return config_from_json(doc);
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

cplx parse_lambda(const std::string& raw)
{
    std::string text;
    for (char ch : raw)
        if (ch != ' ')
            text += ch;
    auto fail = [&] { throw ConfigError("lambda", "cannot parse '" + raw + "'"); };
    if (text.empty())
        fail();
    auto to_double = [&](const std::string& s) {
        double v = 0.0;
        const char* begin = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
        auto res = std::from_chars(begin, s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
            fail();
        return v;
    };
    if (auto comma = text.find(','); comma != std::string::npos)
        return {to_double(text.substr(0, comma)), to_double(text.substr(comma + 1))};

    const char last = text.back();
    if (last != 'i' && last != 'j')
        return {to_double(text), 0.0};
    text.pop_back();
    auto coefficient = [&](const std::string& s) {
        if (s.empty() || s == "+")
            return 1.0;
        if (s == "-")
            return -1.0;
        return to_double(s[0] == '+' ? s.substr(1) : s);
    };
    std::size_t split = std::string::npos;
    for (std::size_t i = text.size(); i-- > 1;) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos)
        return {0.0, coefficient(text)};
    return {to_double(text.substr(0, split)), coefficient(text.substr(split))};
}

void write_csv(const std::string& path, const CsvTable& table, const std::string& comment)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("--out", "cannot write " + path);
    if (!comment.empty())
        out << "# " << comment << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!have_header) {
            t.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells)
            row.push_back(std::strtod(c.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

json to_json(const SolveStats& s)
{
    return {{"accepted_steps", s.accepted_steps},
            {"rejected_steps", s.rejected_steps},
            {"rhs_evaluations", s.rhs_evaluations},
            {"span", json::array({s.x_start, s.x_end})}};
}

json to_json(const EvansResult& r)
{
    return {{"lambda", complex_json(r.lambda)},
            {"D", complex_json(r.D)},
            {"D_canonical", complex_json(r.canonical())},
            {"kappa", complex_json(r.kappa)},
            {"method", to_string(r.method)},
            {"M", r.M},
            {"x_M", r.x_M},
            {"accepted_steps", r.stats.accepted_steps},
            {"rejected_steps", r.stats.rejected_steps},
            {"rhs_evaluations", r.stats.rhs_evaluations}};
}

json to_json(const WindingReport& r)
{
    return {{"contour", {{"kind", "semicircle"}, {"radius", r.contour.radius()}, {"axis_offset", r.contour.axis_offset()}}},
            {"n_samples", r.n_samples},
            {"winding", r.winding},
            {"min_abs_D", r.min_abs_D},
            {"method", r.method}};
}

json to_json(const RootTrace& t)
{
    json roots = json::array();
    for (const cplx& z : t.roots)
        roots.push_back(complex_json(z));
    return {{"parameter", t.parameter},
            {"values", t.values},
            {"roots", roots},
            {"converged", t.converged},
            {"complete", t.complete},
            {"last_good", t.last_good},
            {"message", t.message}};
}

void write_json(const std::string& path, const json& doc)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("--out", "cannot write " + path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path);
    return json::parse(in);
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const GasWaveConfig& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_to_json(config).dump())));
    return buf;
}

json RunManifest::to_json() const
{
    json doc = {{"command_line", command_line},
                {"config_hash", config_hash},
                {"rel_tol", rel_tol},
                {"abs_tol", abs_tol},
                {"M", M},
                {"timestamp", timestamp},
                {"version", version},
                {"stats", stats},
                {"outputs", outputs}};
    doc["tol_from_environment"] = tol_from_environment ? json(*tol_from_environment) : json(nullptr);
    return doc;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_path_for(const std::string& output_path)
{
    return output_path + ".manifest.json";
}

std::optional<double> tolerance_from_environment()
{
    const char* v = std::getenv("ZNDSTAB_TOL");
    if (!v || !*v)
        return std::nullopt;
    char* end = nullptr;
    const double tol = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(tol > 0.0))
        throw ConfigError("ZNDSTAB_TOL", "must be a positive number");
    return tol;
}

} // namespace zndstab
