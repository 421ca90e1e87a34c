#pragma once

#include <span>
#include <utility>
#include <vector>

// Closed-form and series moments of the weakly singular kernels used by
// product integration. Exposed for testing.
namespace fracsens::kernels {

struct Moments {
    double zeroth = 0.0;  // integral of the kernel over the cell
    double first = 0.0;   // integral of (xi - a) times the kernel
};

// Cell [a, b] with A = tau - a > B = tau - b >= 0, kernel (tau - xi)^beta.
// beta > -1 is required when B == 0.
Moments power_kernel(double A, double B, double beta);

// Cell [a, b] inside [0, theta], kernel zeta^(alpha-1) (theta - zeta)^(alpha-1).
Moments two_sided(double a, double b, double theta, double alpha);

struct GaussRule {
    std::vector<double> nodes;  // on [0, 1], ascending
    std::vector<double> weights;
};

// Cached Gauss-Legendre rule on [0, 1]; n in [1, 64].
const GaussRule& gauss_legendre(int n);

}  // namespace fracsens::kernels
