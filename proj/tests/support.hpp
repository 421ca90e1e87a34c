#pragma once

// Test-only oracles.

#include "fracsens/config.hpp"
#include "fracsens/special_functions.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsens::testing {

// L1-scheme Caputo derivative on a uniform grid with spacing h.
inline std::vector<double> l1_caputo(std::span<const double> values, double h, double alpha) {
    const std::size_t n_nodes = values.size();
    std::vector<double> b(n_nodes), out(n_nodes, 0.0);
    for (std::size_t k = 0; k < n_nodes; ++k)
        b[k] = std::pow(k + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(k), 1.0 - alpha);
    const double scale = std::pow(h, -alpha) / fracsens::gamma(2.0 - alpha);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += b[k] * (values[n - k] - values[n - k - 1]);
        out[n] = scale * s;
    }
    return out;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::string source_path(const std::string& relative) { return std::string(FRACSENS_SOURCE_DIR) + "/" + relative; }

inline nlohmann::json fixture(const std::string& name) {
    std::ifstream in(source_path("tests/fixtures/" + name));
    if (!in) throw std::runtime_error("missing fixture " + name);
    return nlohmann::json::parse(in);
}

// Frozen calibration constant for alpha; kind is "state" or "sensitivity".
inline double calibrated(double alpha, const std::string& kind) {
    const auto table = fixture("calibration.json");
    for (const auto& row : table["constants"])
        if (std::abs(row["alpha"].get<double>() - alpha) < 1e-12) return row[kind].get<double>();
    throw std::runtime_error("no calibration constant for this alpha");
}

inline double tol_solver(double C, double alpha, std::size_t N, double scale = 1.0) {
    return 10.0 * C * std::pow(static_cast<double>(N), -(1.0 + alpha)) * std::max(1.0, std::abs(scale));
}

inline config::ProblemConfig corpus(const std::string& name) {
    return config::load_problem(source_path("problems/" + name + ".json"));
}

}  // namespace fracsens::testing
