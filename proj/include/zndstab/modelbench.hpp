#pragma once

// Two-dimensional variable-coefficient model eigenvalue problem on [-M, 0]:
//
//   unfactored  y' = lambda [[1/2, 0], [e^{2x}/c, -1/2]] y
//   factored    y' = lambda [[0, 0],   [e^{2x}/c, -1  ]] y   (y = e^{lambda x/2} y_hat)
//
// Integrated forward (-M -> 0) and backward (0 -> -M) to compare mesh counts.

#include "zndstab/numerics.hpp"

#include <array>
#include <string>
#include <vector>

namespace zndstab {

struct ModelParams {
    double c_decay = 10.0;
    cplx lambda{1.0, 0.0};
    double M = 5.0;
    double rel_tol = 1e-6;
    double abs_tol = 1e-8;
    StepControl control = StepControl::ode45;
};

enum class Variant { factored, unfactored };
enum class Direction { forward, backward };

std::string to_string(Variant v);
std::string to_string(Direction d);

struct BenchCell {
    ModelParams params;
    Variant variant = Variant::factored;
    Direction direction = Direction::forward;
    std::size_t mesh_points = 0;
    CVector endpoint;
    SolveStats stats;
};

OdeField model_field(const ModelParams& params, Variant variant);

// Second component at x = 0 of the bounded factored solution, lambda/(c(lambda+2)).
cplx model_oracle(const ModelParams& params);

// Initial data (1, 0) at the starting end for every variant and direction.
// Runs that overflow (backward factored at large |lambda|) keep stepping as
// ode45 does and are flagged in stats.overflowed.
BenchCell run_cell(const ModelParams& params, Variant variant, Direction direction);

// Table row/column layout.
const std::array<cplx, 11>& table_lambdas();
const std::array<double, 3>& table_decays();

// Published mesh counts; which = 1 (factored) or 2 (unfactored).
std::size_t paper_count(int which, Direction direction, std::size_t lambda_index, std::size_t decay_index);

struct TableEntry {
    std::size_t lambda_index = 0;
    std::size_t decay_index = 0;
    BenchCell forward;
    BenchCell backward;
    std::size_t paper_forward = 0;
    std::size_t paper_backward = 0;
};

struct BenchOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-8;
    double M = 5.0;
    StepControl control = StepControl::ode45;
    unsigned jobs = 1;
};

// Rows ordered by decay (10, 100, 1000) then by lambda in table order.
std::vector<TableEntry> reproduce_table(int which, const BenchOptions& options = {});

struct TrendCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Ratio and trend checks for one table. Table 2 checks also run the factored
// forward cells they compare against.
std::vector<TrendCheck> check_trends(int which, const std::vector<TableEntry>& table, const BenchOptions& options = {});

} // namespace zndstab
