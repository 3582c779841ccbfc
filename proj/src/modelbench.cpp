#include "zndstab/modelbench.hpp"
#include "zndstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zndstab {

std::string to_string(Variant v)
{
    return v == Variant::factored ? "factored" : "unfactored";
}

std::string to_string(Direction d)
{
    return d == Direction::forward ? "forward" : "backward";
}

namespace {

void validate(const ModelParams& p)
{
    if (!(p.c_decay != 0.0) || !std::isfinite(p.c_decay))
        throw DomainError("model decay coefficient c must be finite and nonzero");
    if (!(p.M > 0.0))
        throw DomainError("model domain length M must be positive");
    if (!(p.rel_tol > 0.0) || !(p.abs_tol > 0.0))
        throw DomainError("model tolerances must be positive");
}

// Published counts [decay][lambda].
using CountGrid = std::array<std::array<std::size_t, 11>, 3>;

constexpr CountGrid table1_forward{{
    {19, 43, 107, 261, 657, 14, 17, 43, 111, 317, 1088},
    {14, 29, 76, 191, 519, 12, 13, 29, 77, 224, 870},
    {12, 19, 51, 138, 427, 11, 12, 19, 51, 177, 827},
}};
constexpr CountGrid table1_backward{{
    {26, 94, 363, 1438, 3177, 17, 30, 100, 385, 1528, 6104},
    {24, 92, 361, 1436, 3186, 14, 27, 97, 382, 1523, 6086},
    {19, 88, 357, 1432, 3192, 11, 18, 73, 296, 1185, 4738},
}};
constexpr CountGrid table2_forward{{
    {23, 61, 181, 719, 2868, 16, 20, 55, 196, 765, 3055},
    {19, 58, 181, 719, 2868, 13, 17, 52, 194, 765, 3055},
    {15, 56, 181, 719, 2868, 12, 15, 50, 193, 765, 3055},
}};
constexpr CountGrid table2_backward{{
    {19, 52, 186, 723, 2873, 17, 20, 54, 197, 775, 3084},
    {17, 50, 184, 721, 2871, 13, 17, 52, 195, 771, 3074},
    {15, 49, 183, 721, 2870, 12, 15, 50, 193, 765, 3055},
}};

} // namespace

OdeField model_field(const ModelParams& params, Variant variant)
{
    validate(params);
    OdeField f;
    f.dimension = 2;
    const cplx lambda = params.lambda;
    const double c = params.c_decay;
    if (variant == Variant::factored) {
        f.eval = [lambda, c](double x, const CVector& z) {
            CVector d(2);
            d[0] = 0.0;
            d[1] = lambda * (std::exp(2.0 * x) / c * z[0] - z[1]);
            return d;
        };
    } else {
        f.eval = [lambda, c](double x, const CVector& z) {
            CVector d(2);
            d[0] = lambda * 0.5 * z[0];
            d[1] = lambda * (std::exp(2.0 * x) / c * z[0] - 0.5 * z[1]);
            return d;
        };
    }
    return f;
}

cplx model_oracle(const ModelParams& params)
{
    if (params.lambda == cplx(-2.0, 0.0))
        throw DomainError("model oracle has a pole at lambda = -2");
    return params.lambda / (params.c_decay * (params.lambda + 2.0));
}

BenchCell run_cell(const ModelParams& params, Variant variant, Direction direction)
{
    const OdeField field = model_field(params, variant);
    IntegratorOptions opt;
    opt.rel_tol = params.rel_tol;
    opt.abs_tol = params.abs_tol;
    opt.control = params.control;
    opt.continue_on_overflow = true;
    CVector init(2);
    init << 1.0, 0.0;
    const double a = direction == Direction::forward ? -params.M : 0.0;
    const double b = direction == Direction::forward ? 0.0 : -params.M;
    Solution sol = integrate_adaptive(field, a, b, init, opt);

    BenchCell cell;
    cell.params = params;
    cell.variant = variant;
    cell.direction = direction;
    cell.mesh_points = sol.stats.mesh_points();
    cell.endpoint = std::move(sol.state);
    cell.stats = sol.stats;
    return cell;
}

const std::array<cplx, 11>& table_lambdas()
{
    static const std::array<cplx, 11> values{cplx(1, 0),   cplx(4, 0),     cplx(16, 0),   cplx(64, 0),
                                             cplx(256, 0), cplx(0.4, 0),   cplx(0.4, 1),  cplx(0.4, 4),
                                             cplx(0.4, 16), cplx(0.4, 64), cplx(0.4, 256)};
    return values;
}

const std::array<double, 3>& table_decays()
{
    static const std::array<double, 3> values{10.0, 100.0, 1000.0};
    return values;
}

std::size_t paper_count(int which, Direction direction, std::size_t lambda_index, std::size_t decay_index)
{
    if (which != 1 && which != 2)
        throw DomainError("table must be 1 or 2");
    if (lambda_index >= 11 || decay_index >= 3)
        throw DomainError("table index out of range");
    const CountGrid& g = which == 1 ? (direction == Direction::forward ? table1_forward : table1_backward)
                                    : (direction == Direction::forward ? table2_forward : table2_backward);
    return g[decay_index][lambda_index];
}

std::vector<TableEntry> reproduce_table(int which, const BenchOptions& options)
{
    if (which != 1 && which != 2)
        throw DomainError("table must be 1 or 2");
    const Variant variant = which == 1 ? Variant::factored : Variant::unfactored;
    std::vector<TableEntry> table;
    for (std::size_t ci = 0; ci < 3; ++ci) {
        for (std::size_t li = 0; li < 11; ++li) {
            TableEntry e;
            e.lambda_index = li;
            e.decay_index = ci;
            e.paper_forward = paper_count(which, Direction::forward, li, ci);
            e.paper_backward = paper_count(which, Direction::backward, li, ci);
            table.push_back(std::move(e));
        }
    }
    parallel_for(table.size(), options.jobs, [&](std::size_t i) {
        TableEntry& e = table[i];
        ModelParams p;
        p.c_decay = table_decays()[e.decay_index];
        p.lambda = table_lambdas()[e.lambda_index];
        p.M = options.M;
        p.rel_tol = options.rel_tol;
        p.abs_tol = options.abs_tol;
        p.control = options.control;
        e.forward = run_cell(p, variant, Direction::forward);
        e.backward = run_cell(p, variant, Direction::backward);
    });
    return table;
}

namespace {

double ratio(std::size_t a, std::size_t b)
{
    return static_cast<double>(a) / static_cast<double>(b);
}

std::string cell_name(const TableEntry& e)
{
    std::ostringstream s;
    const cplx l = table_lambdas()[e.lambda_index];
    s << "lambda=" << l.real();
    if (l.imag() != 0.0)
        s << "+" << l.imag() << "i";
    s << " c=" << table_decays()[e.decay_index];
    return s.str();
}

TrendCheck within_factor(const std::vector<TableEntry>& table, Direction d, double factor)
{
    TrendCheck t;
    t.name = to_string(d) + " counts within x" + std::to_string(static_cast<int>(factor)) + " of published";
    t.passed = true;
    double worst = 1.0;
    std::string where;
    for (const TableEntry& e : table) {
        const std::size_t mine = d == Direction::forward ? e.forward.mesh_points : e.backward.mesh_points;
        const std::size_t paper = d == Direction::forward ? e.paper_forward : e.paper_backward;
        const double r = ratio(mine, paper);
        const double off = std::max(r, 1.0 / r);
        if (off > worst) {
            worst = off;
            where = cell_name(e);
        }
        if (off > factor)
            t.passed = false;
    }
    t.detail = "worst ratio " + std::to_string(worst) + (where.empty() ? "" : " at " + where);
    return t;
}

TrendCheck monotone(const std::vector<TableEntry>& table, Direction d)
{
    TrendCheck t;
    t.name = to_string(d) + " counts nondecreasing in |lambda|";
    t.passed = true;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const TableEntry& a = table[i];
        const TableEntry& b = table[i + 1];
        // Real rows 0..4 and complex rows 5..10 form separate runs.
        if (a.decay_index != b.decay_index || a.lambda_index == 4)
            continue;
        const std::size_t ca = d == Direction::forward ? a.forward.mesh_points : a.backward.mesh_points;
        const std::size_t cb = d == Direction::forward ? b.forward.mesh_points : b.backward.mesh_points;
        if (cb < ca) {
            t.passed = false;
            t.detail += cell_name(b) + " (" + std::to_string(cb) + " < " + std::to_string(ca) + ") ";
        }
    }
    if (t.passed)
        t.detail = "ok";
    return t;
}

} // namespace

std::vector<TrendCheck> check_trends(int which, const std::vector<TableEntry>& table, const BenchOptions& options)
{
    std::vector<TrendCheck> out;
    out.push_back(within_factor(table, Direction::forward, 2.0));
    out.push_back(within_factor(table, Direction::backward, 2.0));
    out.push_back(monotone(table, Direction::forward));
    out.push_back(monotone(table, Direction::backward));

    if (which == 1) {
        TrendCheck t;
        t.name = "backward/forward >= 3 at lambda in {64, 256}, c = 10";
        t.passed = true;
        for (const TableEntry& e : table) {
            if (e.decay_index != 0 || (e.lambda_index != 3 && e.lambda_index != 4))
                continue;
            const double r = ratio(e.backward.mesh_points, e.forward.mesh_points);
            t.detail += cell_name(e) + ": " + std::to_string(r) + " ";
            if (r < 3.0)
                t.passed = false;
        }
        out.push_back(t);

        TrendCheck o;
        o.name = "factored forward endpoint matches lambda/(c(lambda+2))";
        o.passed = true;
        double worst = 0.0, worst_hf = 0.0;
        for (const TableEntry& e : table) {
            const cplx exact = model_oracle(e.forward.params);
            const double err = std::abs(e.forward.endpoint[1] - exact) / std::abs(exact);
            const bool high = std::abs(table_lambdas()[e.lambda_index].imag()) >= 64.0;
            (high ? worst_hf : worst) = std::max(high ? worst_hf : worst, err);
            if (err > (high ? 1e-3 : 1e-4))
                o.passed = false;
        }
        o.detail = "max rel error " + std::to_string(worst) + " (|Im| >= 64 rows: " + std::to_string(worst_hf) + ")";
        out.push_back(o);
    } else {
        TrendCheck t;
        t.name = "forward and backward within x1.5";
        t.passed = true;
        double worst = 1.0;
        for (const TableEntry& e : table) {
            const double r = ratio(e.forward.mesh_points, e.backward.mesh_points);
            worst = std::max({worst, r, 1.0 / r});
        }
        t.passed = worst <= 1.5;
        t.detail = "worst ratio " + std::to_string(worst);
        out.push_back(t);

        TrendCheck s;
        s.name = "factored forward beats unfactored forward by >= x1.5 at lambda = 256";
        s.passed = true;
        TrendCheck u;
        u.name = "factored forward <= unfactored forward for |lambda| >= 16";
        u.passed = true;
        for (const TableEntry& e : table) {
            const cplx lambda = table_lambdas()[e.lambda_index];
            if (std::abs(lambda) < 16.0)
                continue;
            ModelParams p = e.forward.params;
            p.M = options.M;
            p.rel_tol = options.rel_tol;
            p.abs_tol = options.abs_tol;
            p.control = options.control;
            const BenchCell fac = run_cell(p, Variant::factored, Direction::forward);
            if (fac.mesh_points > e.forward.mesh_points) {
                u.passed = false;
                u.detail += cell_name(e) + " ";
            }
            if (e.lambda_index == 4) {
                const double r = ratio(e.forward.mesh_points, fac.mesh_points);
                s.detail += cell_name(e) + ": x" + std::to_string(r) + " ";
                if (r < 1.5)
                    s.passed = false;
            }
        }
        if (u.passed)
            u.detail = "ok";
        out.push_back(s);
        out.push_back(u);
    }
    return out;
}

} // namespace zndstab
