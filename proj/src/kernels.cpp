#include "fracsens/kernels.hpp"

#include "fracsens/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace fracsens::kernels {

namespace {

constexpr double kSeriesTol = 1e-17;

// integral_0^x zeta^(alpha-1+j) (theta - zeta)^(alpha-1), j = 0, 1, for x <= theta / 2
std::pair<double, double> left_end(double x, double theta, double alpha) {
    if (x <= 0.0) return {0.0, 0.0};
    const double r = x / theta;
    double ck = 1.0, rk = 1.0;
    double s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double t0 = ck * rk / (alpha + k);
        const double t1 = ck * rk / (alpha + 1 + k);
        s0 += t0;
        s1 += t1;
        if (t0 <= kSeriesTol * s0) break;
        ck *= (1.0 - alpha + k) / (k + 1.0);
        rk *= r;
    }
    const double scale = std::pow(theta, alpha - 1.0) * std::pow(x, alpha);
    return {scale * s0, scale * x * s1};
}

Moments gauss(double a, double b, double theta, double alpha) {
    const double w = b - a;
    const double dist = std::min(a, theta - b);
    const double ratio = 1.0 + 2.0 * dist / w;
    const double rho = ratio + std::sqrt(ratio * ratio - 1.0);
    int n = static_cast<int>(std::ceil(37.0 / (2.0 * std::log(rho)))) + 1;
    n = std::clamp(n, 4, 32);
    const auto& rule = gauss_legendre(n);
    Moments m;
    for (int i = 0; i < n; ++i) {
        const double u = w * rule.nodes[i];
        const double z = a + u;
        const double f = rule.weights[i] * std::pow(z, alpha - 1.0) * std::pow(theta - z, alpha - 1.0);
        m.zeroth += f;
        m.first += u * f;
    }
    m.zeroth *= w;
    m.first *= w;
    return m;
}

}  // namespace

Moments power_kernel(double A, double B, double beta) {
    const double w = A - B;
    if (!(w > 0.0)) return {};
    const double eps = w / A;
    if (eps <= 0.5) {
        // (1 - y)^beta expanded in y = (xi - a)/A, coefficients (-beta)_k / k!
        double ck = 1.0, ek = eps;
        double s0 = 0.0, s1 = 0.0;
        for (int k = 0; k < 400; ++k) {
            const double t0 = ck * ek / (k + 1.0);
            const double t1 = ck * ek * eps / (k + 2.0);
            s0 += t0;
            s1 += t1;
            if (std::abs(t0) <= kSeriesTol * std::abs(s0)) break;
            ck *= (-beta + k) / (k + 1.0);
            ek *= eps;
        }
        const double a1 = std::pow(A, beta + 1.0);
        return {a1 * s0, a1 * A * s1};
    }
    const double pa1 = std::pow(A, beta + 1.0), pa2 = pa1 * A;
    const double pb1 = B > 0.0 ? std::pow(B, beta + 1.0) : 0.0;
    const double pb2 = B > 0.0 ? pb1 * B : 0.0;
    const double i0 = (pa1 - pb1) / (beta + 1.0);
    return {i0, A * i0 - (pa2 - pb2) / (beta + 2.0)};
}

Moments two_sided(double a, double b, double theta, double alpha) {
    if (!(b > a)) return {};
    const double half = 0.5 * theta;
    if (a < half && b > half) {
        const Moments l = two_sided(a, half, theta, alpha);
        const Moments r = two_sided(half, b, theta, alpha);
        return {l.zeroth + r.zeroth, l.first + r.first + (half - a) * r.zeroth};
    }
    const double w = b - a;
    if (b <= half) {
        if (a > w) return gauss(a, b, theta, alpha);
        const auto [v0b, v1b] = left_end(b, theta, alpha);
        const auto [v0a, v1a] = left_end(a, theta, alpha);
        const double k0 = v0b - v0a;
        return {k0, (v1b - v1a) - a * k0};
    }
    const double la = theta - a, lb = theta - b;
    if (lb > w) return gauss(a, b, theta, alpha);
    const auto [w0a, w1a] = left_end(la, theta, alpha);
    const auto [w0b, w1b] = left_end(lb, theta, alpha);
    const double k0 = w0a - w0b;
    return {k0, la * k0 - (w1a - w1b)};
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw DomainError("gauss_legendre: point count must lie in [1, 64]");
    static std::array<GaussRule, 65> cache;
    static std::array<std::once_flag, 65> flags;
    std::call_once(flags[static_cast<std::size_t>(n)], [n] {
        GaussRule rule;
        rule.nodes.resize(static_cast<std::size_t>(n));
        rule.weights.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            if (n == 1) dp = 1.0, z = 0.0;
            const double wgt = 1.0 / ((1.0 - z * z) * dp * dp);  // on [-1,1] this is 2/(...)
            const auto lo = static_cast<std::size_t>(i);
            const auto hi = static_cast<std::size_t>(n - 1 - i);
            rule.nodes[lo] = 0.5 * (1.0 - z);
            rule.nodes[hi] = 0.5 * (1.0 + z);
            rule.weights[lo] = wgt;
            rule.weights[hi] = wgt;
        }
        if (n == 1) rule.nodes[0] = 0.5, rule.weights[0] = 1.0;
        cache[static_cast<std::size_t>(n)] = std::move(rule);
    });
    return cache[static_cast<std::size_t>(n)];
}

}  // namespace fracsens::kernels
