#include "fracsens/special_functions.hpp"

#include "fracsens/errors.hpp"

#include <mpfr.h>

#include <array>
#include <limits>
#include <memory>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fracsens {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos(double x) {
    x -= 1.0;
    double a = kLanczos[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    // split the power so that t^(x+0.5) does not overflow before e^-t scales it down
    const double half = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * a;
}

class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }
    operator mpfr_ptr() { return v_; }

private:
    mpfr_t v_;
};

// Small-denominator rational p/q equal to x up to rounding, if any.
std::optional<std::pair<long, long>> as_rational(double x, long max_den) {
    for (long q = 1; q <= max_den; ++q) {
        const double p = std::round(x * q);
        if (p >= 1 && std::abs(p / q - x) <= 4 * std::numeric_limits<double>::epsilon() * x)
            return std::pair{static_cast<long>(p), q};
    }
    return std::nullopt;
}

// log of the largest series term |z|^k / Gamma(alpha k + beta) over real k >= 0.
double log_peak_term(double alpha, double beta, double az) {
    if (az == 0.0) return -std::lgamma(beta);
    const double lz = std::log(az);
    auto log_term = [&](double k) { return k * lz - std::lgamma(alpha * k + beta); };
    // digamma(alpha k + beta) = log|z| / alpha near the peak; x ~ exp(lz/alpha) + 1/2
    double best = log_term(0.0);
    const double x_peak = std::exp(lz / alpha) + 0.5;
    if (std::isfinite(x_peak)) {
        const double k_peak = (x_peak - beta) / alpha;
        for (double k : {std::floor(k_peak) - 1, std::floor(k_peak), std::floor(k_peak) + 1,
                         std::floor(k_peak) + 2})
            if (k >= 0) best = std::max(best, log_term(k));
    } else {
        best = std::numeric_limits<double>::infinity();
    }
    return best;
}

struct SeriesResult {
    double value;
    double abs_sum;  // sum of |terms|, used as the rounding error scale
};

SeriesResult series_double(double alpha, double beta, double z) {
    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    const double lz = std::log(std::abs(z));
    for (int k = 0; k < 100000; ++k) {
        const double arg = alpha * k + beta;
        double term;
        if (z == 0.0) {
            term = k == 0 ? 1.0 / gamma(beta) : 0.0;
        } else if (arg < 170.0) {
            term = std::pow(z, k) / gamma(arg);
        } else {
            term = std::exp(k * lz - std::lgamma(arg));
            if (z < 0 && (k % 2)) term = -term;
        }
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_sum += std::abs(term);
        const double mag = std::abs(term);
        if (mag <= 1e-18 * std::abs(sum) && mag <= prev) break;
        if (z == 0.0) break;
        prev = mag;
    }
    return {sum, abs_sum};
}

// Series in MPFR at the given precision; returns value and log2(max |term|).
std::pair<double, double> series_mpfr(double alpha, double beta, double z, mpfr_prec_t prec) {
    Mpfr sum(prec), term(prec), zpow(prec), g(prec), arg(prec), tmp(prec), bound(prec);
    mpfr_set_zero(sum, 1);
    mpfr_set_ui(zpow, 1, MPFR_RNDN);
    double log2_max = -1e300;

    const auto rational = as_rational(alpha, 1000);
    // reciprocal gammas 1/Gamma(alpha k + beta) for the last q indices (rational case)
    std::vector<std::unique_ptr<Mpfr>> rg;
    long q = 0, p = 0;
    if (rational) {
        p = rational->first;
        q = rational->second;
        for (long i = 0; i < q; ++i) rg.push_back(std::make_unique<Mpfr>(prec));
    }

    Mpfr alpha_m(prec);
    if (rational) {
        mpfr_set_si(alpha_m, p, MPFR_RNDN);
        mpfr_div_si(alpha_m, alpha_m, q, MPFR_RNDN);
    } else {
        mpfr_set_d(alpha_m, alpha, MPFR_RNDN);
    }

    bool past_peak = false;
    for (long k = 0;; ++k) {
        // arg = alpha*k + beta
        mpfr_mul_si(arg, alpha_m, k, MPFR_RNDN);
        mpfr_add_d(arg, arg, beta, MPFR_RNDN);
        if (rational && k >= q) {
            // 1/Gamma(a + p) = 1/Gamma(a) / prod_{i<p}(a + i), a = alpha (k - q) + beta
            Mpfr& slot = *rg[static_cast<std::size_t>(k % q)];
            mpfr_sub_si(tmp, arg, p, MPFR_RNDN);
            for (long i = 0; i < p; ++i) {
                mpfr_div(slot, slot, tmp, MPFR_RNDN);
                mpfr_add_ui(tmp, tmp, 1, MPFR_RNDN);
            }
            mpfr_mul(term, zpow, slot, MPFR_RNDN);
        } else {
            mpfr_gamma(g, arg, MPFR_RNDN);
            if (rational) {
                Mpfr& slot = *rg[static_cast<std::size_t>(k)];
                mpfr_ui_div(slot, 1, g, MPFR_RNDN);
                mpfr_mul(term, zpow, slot, MPFR_RNDN);
            } else {
                mpfr_div(term, zpow, g, MPFR_RNDN);
            }
        }
        mpfr_add(sum, sum, term, MPFR_RNDN);

        if (!mpfr_zero_p(term.get())) {
            long e = 0;
            const double m = mpfr_get_d_2exp(&e, term, MPFR_RNDN);
            const double l2 = std::log2(std::abs(m)) + static_cast<double>(e);
            if (l2 < log2_max) past_peak = true;
            log2_max = std::max(log2_max, l2);
            if (past_peak && !mpfr_zero_p(sum.get())) {
                const double l2sum = static_cast<double>(mpfr_get_exp(sum.get()));
                if (l2 < l2sum - static_cast<double>(prec) - 8) break;
            }
        } else if (k > 0) {
            break;
        }
        mpfr_mul_d(zpow, zpow, z, MPFR_RNDN);
        if (k > 10'000'000) throw RangeError("mittag_leffler: series did not terminate");
    }
    return {mpfr_get_d(sum, MPFR_RNDN), log2_max};
}

}  // namespace

double gamma(double x) {
    if (!(x > 0.0)) throw DomainError("gamma: argument must be positive, got " + std::to_string(x));
    if (x > 171.6) throw RangeError("gamma: result overflows for x = " + std::to_string(x));
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos(1.0 - x));
    return lanczos(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: arguments must be positive");
    if (a + b < 170.0) return gamma(a) * gamma(b) / gamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double mittag_leffler(MLParams params, double z) {
    const double alpha = params.alpha, beta = params.beta;
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("mittag_leffler: alpha must lie in (0, 2]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("mittag_leffler: beta must be positive");
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: non-finite argument");
    if (std::abs(z) > kMittagLefflerMaxArg)
        throw RangeError("mittag_leffler: |z| exceeds the supported range 100");
    if (z == 0.0) return 1.0 / gamma(beta);

    const double log_peak = log_peak_term(alpha, beta, std::abs(z));
    if (z > 0.0 && log_peak > 700.0)
        throw RangeError("mittag_leffler: value overflows a double");

    if (std::abs(z) <= 5.0) {
        const auto [value, abs_sum] = series_double(alpha, beta, z);
        if (std::isfinite(value) && value != 0.0 &&
            64 * std::numeric_limits<double>::epsilon() * abs_sum <= 1e-12 * std::abs(value))
            return value;
    }

    constexpr mpfr_prec_t kMaxPrec = 4096;
    const double peak_bits = std::max(0.0, log_peak / std::numbers::ln2);
    auto prec = static_cast<mpfr_prec_t>(96 + peak_bits + 32);
    for (int attempt = 0; attempt < 4; ++attempt) {
        if (prec > kMaxPrec)
            throw RangeError("mittag_leffler: cancellation exceeds the supported precision");
        const auto [value, log2_max] = series_mpfr(alpha, beta, z, prec);
        if (!std::isfinite(value)) throw RangeError("mittag_leffler: value overflows a double");
        const double lost = value == 0.0 ? static_cast<double>(prec) : log2_max - std::log2(std::abs(value));
        const double needed = 53 + 24 + std::max(0.0, lost);
        if (needed <= static_cast<double>(prec)) return value;
        prec = static_cast<mpfr_prec_t>(needed + 64);
    }
    throw RangeError("mittag_leffler: precision escalation did not settle");
}

}  // namespace fracsens
