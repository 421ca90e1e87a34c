#pragma once

namespace fracsens {

struct MLParams {
    double alpha;
    double beta;
};

// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
double gamma(double x);

double beta_fn(double a, double b);

// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for |z| <= 100.
// Plain double series with compensated summation when that is accurate enough,
// MPFR series otherwise. Throws RangeError when the value overflows a double
// or when cancellation needs more precision than the evaluator allows.
double mittag_leffler(MLParams params, double z);

inline constexpr double kMittagLefflerMaxArg = 100.0;

}  // namespace fracsens
