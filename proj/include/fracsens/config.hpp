#pragma once

#include "fracsens/errors.hpp"
#include "fracsens/expr.hpp"
#include "fracsens/problem_model.hpp"
#include "fracsens/volterra.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace fracsens::config {

// Schema violation; pointer() is the JSON pointer of the offending value.
class ConfigError : public ValidationError {
public:
    ConfigError(std::string pointer, const std::string& what)
        : ValidationError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

enum class MeshKind { Uniform, Graded };
enum class OutputFormat { Csv, Json };

struct ProblemConfig {
    std::string name;
    double alpha = 0.5;
    double T = 1.0;
    std::string f;
    double growth_gamma = 0.0;
    double t = 0.0;
    double w0 = 0.0;
    PiecewiseLinear lw;
    std::optional<std::string> exact_solution;  // x(tau), for convergence studies
    std::size_t N = 1024;
    MeshKind mesh_kind = MeshKind::Uniform;
    double grading = 0.0;  // 0 selects 2 / alpha
    Corrector corrector = Corrector::Newton;
    std::uint64_t seed = 0;
    std::optional<OutputFormat> format;
    std::optional<std::string> output_path;
    std::string canonical;  // normalized JSON text, input to the config hash
};

ProblemConfig parse_problem(std::string_view json_text);
ProblemConfig load_problem(const std::filesystem::path& path);

void validate_N(std::size_t N);
double effective_grading(const ProblemConfig& cfg);

Problem make_problem(const ProblemConfig& cfg);
HistoryData make_history(const ProblemConfig& cfg);
// Mesh of [0, 1] for the rescaled solvers.
Mesh make_mesh(const ProblemConfig& cfg);
SolverOptions make_solver_options(const ProblemConfig& cfg);
// Piecewise data {"breaks": [...], "values": [...]} or {"breaks", "left", "right"}.
PiecewiseLinear parse_piecewise(std::string_view json_text);

std::uint64_t fnv1a(std::string_view text);
std::string hash_hex(std::uint64_t h);

}  // namespace fracsens::config
