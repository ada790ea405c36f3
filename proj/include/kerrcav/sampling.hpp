#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "kerrcav/model.hpp"

namespace kerrcav {

/// Random two-qubit density matrix G G^dagger / tr(G G^dagger) with G a
/// 4 x rank complex Ginibre matrix. rank 4 gives full-rank states, rank 1 pure ones.
template <class Rng>
Eigen::Matrix4cd random_density_matrix(Rng& rng, int rank = 4) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd g(4, rank);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cplx(normal(rng), normal(rng));
    Eigen::Matrix4cd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

/// Haar-random single-qubit unitary (QR of a complex Ginibre matrix with the
/// phases of R's diagonal divided out).
template <class Rng>
Eigen::Matrix2cd random_qubit_unitary(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix2cd g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j) = cplx(normal(rng), normal(rng));
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    Eigen::Matrix2cd q = qr.householderQ();
    const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < 2; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

/// (u1 x u2) rho (u1 x u2)^dagger in the canonical ordering.
inline Eigen::Matrix4cd apply_local_unitaries(const Eigen::Matrix4cd& rho, const Eigen::Matrix2cd& u1,
                                              const Eigen::Matrix2cd& u2) {
    Eigen::Matrix4cd u;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) u(2 * a + b, 2 * c + d) = u1(a, c) * u2(b, d);
    return u * rho * u.adjoint();
}

}  // namespace kerrcav
