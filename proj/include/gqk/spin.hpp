#pragma once

#include <Eigen/Dense>

#include "gqk/core.hpp"
#include "gqk/grid.hpp"

namespace gqk {

using Mat = Eigen::MatrixXcd;

/// Standard ladder construction of the spin-s matrices on C^{2s+1}:
/// s3 diagonal with entries s, s-1, ..., -s; s1, s2 from the raising and
/// lowering operators. They satisfy [s_a, s_b] = i eps_abc s_c.
struct SpinMatrices {
    std::uint32_t two_s = 0;
    std::array<Mat, 3> s;

    explicit SpinMatrices(std::uint32_t ts) : two_s(ts) {
        const std::uint32_t d = ts + 1;
        const double sval = ts / 2.0;
        Mat s3 = Mat::Zero(d, d);
        Mat sp = Mat::Zero(d, d);
        for (std::uint32_t j = 0; j < d; ++j) {
            const double m = sval - static_cast<double>(j);
            s3(j, j) = m;
            if (j > 0) sp(j - 1, j) = std::sqrt(sval * (sval + 1.0) - m * (m + 1.0));
        }
        const Mat sm = sp.adjoint();
        s[0] = 0.5 * (sp + sm);
        s[1] = cplx(0.0, -0.5) * (sp - sm);
        s[2] = s3;
    }

    explicit SpinMatrices(const SpinSpec& sp) : SpinMatrices(sp.two_s) {}

    std::uint32_t dim() const { return two_s + 1; }
};

/// exp(i H) for Hermitian H, via the spectral decomposition.
inline Mat exp_i_hermitian(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const auto& lam = es.eigenvalues();
    Mat d = Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index j = 0; j < lam.size(); ++j) d(j, j) = std::exp(iu * lam[j]);
    return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

/// Spin rotor L = exp(-i theta n.s) for rotation angle theta about unit
/// axis n; theta in [0, 2pi) distinguishes the two SU(2) lifts.
inline Mat spin_rotor(const SpinMatrices& sm, double theta, const Vec3& axis) {
    Mat h = Mat::Zero(sm.dim(), sm.dim());
    for (int a = 0; a < 3; ++a) h += axis[a] * sm.s[a];
    return exp_i_hermitian(-theta * h);
}

inline double hermiticity_defect(const Mat& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace gqk
