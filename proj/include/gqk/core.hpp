#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gqk {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};

/// Tolerance tiers used throughout: exact linear algebra, spectral
/// identities on band-limited states, time-evolution-mediated checks.
inline constexpr double tol_exact = 1e-12;
inline constexpr double tol_spectral = 1e-8;
inline constexpr double tol_evolution = 1e-5;

struct Vec3 {
    double x[3]{0.0, 0.0, 0.0};

    Vec3() = default;
    Vec3(double a, double b, double c) : x{a, b, c} {}

    double& operator[](int i) { return x[i]; }
    double operator[](int i) const { return x[i]; }

    Vec3 operator+(const Vec3& o) const { return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2]}; }
    Vec3 operator-(const Vec3& o) const { return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2]}; }
    Vec3 operator-() const { return {-x[0], -x[1], -x[2]}; }
    Vec3 operator*(double s) const { return {x[0] * s, x[1] * s, x[2] * s}; }

    double dot(const Vec3& o) const { return x[0] * o.x[0] + x[1] * o.x[1] + x[2] * o.x[2]; }
    double norm() const { return std::sqrt(dot(*this)); }
    double max_abs() const { return std::max({std::fabs(x[0]), std::fabs(x[1]), std::fabs(x[2])}); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline bool is_power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// Levi-Civita symbol restricted to pairwise-distinct indices; 0 otherwise.
inline int levi_civita(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    if ((a + 1) % 3 == b) return 1;  // cyclic (0,1,2)
    return -1;
}

/// For a fixed pair (a,b) with a != b, the third axis.
inline int third_axis(int a, int b) { return 3 - a - b; }

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares on (x, y); r2 = 1 for a perfect line.
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit f;
    f.points = xs.size();
    if (xs.size() < 2 || xs.size() != ys.size()) return f;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::fabs(det) < 1e-300) return f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = f.slope * xs[i] + f.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

/// Log-log power fit of y ~ C x^slope over strictly positive samples.
inline LineFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    lx.reserve(xs.size());
    ly.reserve(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > 0 && ys[i] > 0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    }
    return fit_line(lx, ly);
}

}  // namespace gqk
