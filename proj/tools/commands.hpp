#pragma once
//
// Subcommands of the hbie tool. Each builds a Table; run_cli adds parsing,
// JSON config merging and output.
//

#include "table.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbie_cli {

// Bad flags, config file or parameters: exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The default k grid 20 * 2^j, j = 0..6.
std::vector<double> default_k_grid();

// "auto" (modes on a circle, matrix otherwise), "modes", "matrix" (N =
// max(256, ceil(10 k)) rounded up to even) or a fixed even N.
struct NRule {
    enum class Kind { Auto, Modes, Matrix, Fixed } kind = Kind::Auto;
    int fixed = 0;
    static NRule parse(const std::string& s);
};
int matrix_size(double k);

struct SweepArgs {
    std::string geometry = "circle";
    std::vector<double> params;
    std::vector<double> k = default_k_grid();
    double eta_a = 1.0, eta_b = 0.0;
    std::string N = "auto";
    int refinement = 2;
    bool gmres = false, coercivity = false, residuals = false, maps = false;
    double tol = 1e-8;
    double alpha = 0.0;  // incidence angle for the GMRES right-hand side
    int theta = 720;
};

struct SharpnessArgs {
    std::vector<double> k = default_k_grid();
    double radius = 1.0;
    double truncation_factor = 1.0;
};

struct PolesArgs {
    double a = 1.0, b = 1.0;
    double re_min = 1.0, re_max = 40.0, im_min = -2.0, im_max = 0.5;
    double density = 10.0;
    int n_max = 60;
};

struct MieArgs {
    double k = 10.0, radius = 1.0, alpha = 0.0;
    int angles = 360;
    int N = 0;  // > 0: also solve the CFIE on N nodes and compare
    double eta_a = 1.0, eta_b = 0.0;
    int refinement = 2;
};

struct BilliardsArgs {
    std::vector<std::string> obstacles;  // see parse_obstacle
    double R = 5.0, budget = 200.0;
    int samples = 10000;
    unsigned long long seed = 1;
};

struct GmresBenchArgs {
    std::string geometry = "kite";
    std::vector<double> params;
    std::vector<double> k{10.0, 20.0, 40.0};
    std::string N = "matrix";
    double eta_a = 1.0, eta_b = 0.0;
    double tol = 1e-8;
    int max_iterations = 2000;
    double alpha = 0.0;
    int refinement = 2;
};

struct CoercivityArgs {
    std::string geometry = "circle";
    std::vector<double> params;
    std::vector<double> k{5.0, 10.0, 20.0};
    std::string N = "auto";
    double eta_a = 1.0, eta_b = 0.0;
    int theta = 720;
    int refinement = 2;
};

Table cmd_sweep(const SweepArgs& a);
Table cmd_sharpness(const SharpnessArgs& a);
Table cmd_poles(const PolesArgs& a);
Table cmd_mie(const MieArgs& a);
Table cmd_billiards(const BilliardsArgs& a);
Table cmd_gmres_bench(const GmresBenchArgs& a);
Table cmd_coercivity(const CoercivityArgs& a);

// "circle:1@2,0", "kite", "ellipse:2,1", "polygon:0,0;1,0;0,1". Also accepts
// the JSON object forms {"family", "params", "offset"} and {"polygon"} after
// conversion by obstacle_from_json.
std::string obstacle_from_json(const nlohmann::json& j);

// True when the table has rows and every row carries an error.
bool all_rows_failed(const Table& t);

// Full tool: returns the exit code (0, 2 or 3).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hbie_cli
