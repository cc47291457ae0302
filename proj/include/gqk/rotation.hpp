#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gqk/core.hpp"

namespace gqk {

/// Unit quaternion; kept un-canonicalized so q and -q are distinct SU(2)
/// elements (the spin rotor is single-valued on quaternions).
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Quat conj() const { return {w, -x, -y, -z}; }

    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
    }

    /// Active rotation of a vector.
    Vec3 rotate(const Vec3& v) const {
        const Quat p{0.0, v[0], v[1], v[2]};
        const Quat r = (*this) * p * conj();
        return {r.x, r.y, r.z};
    }

    Vec3 rotate_inv(const Vec3& v) const { return conj().rotate(v); }

    std::array<std::array<double, 3>, 3> matrix() const {
        const double xx = x * x, yy = y * y, zz = z * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        return {{{1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy)},
                 {2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx)},
                 {2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy)}}};
    }

    /// Rotation angle in [0, 2pi) and unit axis. Identity reports axis e3.
    void axis_angle(double& theta, Vec3& axis) const {
        const double vn = std::sqrt(x * x + y * y + z * z);
        theta = 2.0 * std::atan2(vn, w);
        if (vn < 1e-300) {
            axis = {0.0, 0.0, 1.0};
        } else {
            axis = {x / vn, y / vn, z / vn};
        }
    }

    bool approx_identity(double tol = 1e-12) const {
        return std::fabs(std::fabs(w) - 1.0) <= tol && std::fabs(x) <= tol &&
               std::fabs(y) <= tol && std::fabs(z) <= tol;
    }

    bool approx_rotation_identity(double tol = 1e-12) const {
        // identity as an SO(3) element (either SU(2) lift)
        return approx_identity(tol);
    }

    static Quat from_axis_angle(const Vec3& axis, double theta) {
        const double n = axis.norm();
        const double h = 0.5 * theta;
        const double s = std::sin(h) / (n > 0 ? n : 1.0);
        return {std::cos(h), axis[0] * s, axis[1] * s, axis[2] * s};
    }

    /// Shepperd's method, returning the lift with w >= 0.
    static Quat from_matrix(const std::array<std::array<double, 3>, 3>& m) {
        const double tr = m[0][0] + m[1][1] + m[2][2];
        Quat q;
        if (tr > 0) {
            const double s = std::sqrt(tr + 1.0) * 2.0;
            q = {0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s,
                 (m[1][0] - m[0][1]) / s};
        } else if (m[0][0] >= m[1][1] && m[0][0] >= m[2][2]) {
            const double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
            q = {(m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s,
                 (m[0][2] + m[2][0]) / s};
        } else if (m[1][1] >= m[2][2]) {
            const double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
            q = {(m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s,
                 (m[1][2] + m[2][1]) / s};
        } else {
            const double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
            q = {(m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s,
                 0.25 * s};
        }
        q = q.normalized();
        if (q.w < 0) q = {-q.w, -q.x, -q.y, -q.z};
        return q;
    }
};

/// One of the 24 proper rotations of the cubic lattice: a named quaternion
/// together with its exact signed-permutation matrix.
struct LatticeRotation {
    std::string name;
    Quat quat;
    std::array<std::array<int, 3>, 3> imat;
};

namespace detail {

inline std::string lattice_rotation_name(const Quat& q) {
    double theta;
    Vec3 axis;
    q.axis_angle(theta, axis);
    if (theta < 1e-9) return "I";
    // canonicalize axis sign: first nonzero component positive
    double sign = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (std::fabs(axis[a]) > 1e-9) {
            sign = axis[a] > 0 ? 1.0 : -1.0;
            break;
        }
    }
    if (sign < 0) {
        axis = -axis;
        theta = 2.0 * pi - theta;
    }
    std::string s;
    const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (std::fabs(axis[a]) > 1e-9) {
            if (axis[a] < 0) s += "m";
            s += names[a];
        }
    }
    const int deg = static_cast<int>(std::lround(theta * 180.0 / pi));
    return s + std::to_string(deg);
}

}  // namespace detail

/// The 24 signed-permutation rotations, deterministic order, named like
/// "z90", "xyz120", "xmy180".
inline const std::vector<LatticeRotation>& lattice_rotations() {
    static const std::vector<LatticeRotation> table = [] {
        std::vector<LatticeRotation> out;
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        const int perm_sign[6] = {1, -1, -1, 1, 1, -1};
        for (int p = 0; p < 6; ++p)
            for (int sbits = 0; sbits < 8; ++sbits) {
                int sg[3] = {(sbits & 1) ? -1 : 1, (sbits & 2) ? -1 : 1, (sbits & 4) ? -1 : 1};
                if (perm_sign[p] * sg[0] * sg[1] * sg[2] != 1) continue;  // det must be +1
                std::array<std::array<int, 3>, 3> m{};
                std::array<std::array<double, 3>, 3> md{};
                for (int r = 0; r < 3; ++r) {
                    m[r][perms[p][r]] = sg[r];
                    md[r][perms[p][r]] = sg[r];
                }
                const Quat q = Quat::from_matrix(md);
                out.push_back({detail::lattice_rotation_name(q), q, m});
            }
        return out;
    }();
    return table;
}

inline const LatticeRotation* find_lattice_rotation(const std::string& name) {
    for (const auto& r : lattice_rotations())
        if (r.name == name) return &r;
    return nullptr;
}

/// Integer signed-permutation matrix of q if its rotation is a lattice
/// rotation (either SU(2) lift), otherwise nullopt.
inline std::optional<std::array<std::array<int, 3>, 3>> lattice_matrix(const Quat& q,
                                                                       double tol = 1e-10) {
    const auto m = q.matrix();
    std::array<std::array<int, 3>, 3> im{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double v = m[r][c];
            const double rv = std::round(v);
            if (std::fabs(v - rv) > tol || std::fabs(rv) > 1.0) return std::nullopt;
            im[r][c] = static_cast<int>(rv);
        }
    return im;
}

}  // namespace gqk
