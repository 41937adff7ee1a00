#pragma once

#include <optional>
#include <random>

#include "odc/instances.hpp"
#include "odc/objective.hpp"

namespace odc::testutil {

// a = -1, b = 1, q = r = d0 = 1, dense (scalar) mask.
inline ProblemInstance scalar_instance() {
    Matrix one = Matrix::Ones(1, 1);
    return ProblemInstance(-one, one, one, one, one, SparsityMask::dense(1, 1));
}

// Optimal scalar gain at damping alpha for the instance above.
inline double scalar_optimum(double alpha) {
    return (1.0 + alpha) - std::sqrt(alpha * alpha + 2.0 * alpha + 2.0);
}

// Draws masked N(0, scale) gains until one stabilizes (A, B) at alpha.
inline std::optional<Matrix> find_stabilizing(const ProblemInstance& inst, double alpha,
                                              std::mt19937_64& rng, int tries = 200,
                                              double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    for (int t = 0; t < tries; ++t) {
        Matrix K = Matrix::Zero(inst.m(), inst.n());
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            for (Eigen::Index i = 0; i < K.rows(); ++i) {
                if (inst.mask.indicator(i, j) != 0.0) K(i, j) = normal(rng);
            }
        }
        if (is_stabilizing(inst, K, alpha)) return K;
    }
    return std::nullopt;
}

// Central finite differences of the cost with respect to the free entries.
inline Matrix fd_gradient(const ProblemInstance& inst, const Matrix& K, double alpha,
                          double h = 1e-6) {
    Matrix G = Matrix::Zero(inst.m(), inst.n());
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
        for (Eigen::Index i = 0; i < K.rows(); ++i) {
            if (inst.mask.indicator(i, j) == 0.0) continue;
            Matrix Kp = K, Km = K;
            Kp(i, j) += h;
            Km(i, j) -= h;
            G(i, j) = (cost(inst, Kp, alpha) - cost(inst, Km, alpha)) / (2.0 * h);
        }
    }
    return G;
}

// Central finite differences of the full gradient; column-major vec(K) indexing
// to match the analytic Hessian.
inline Matrix fd_hessian(const ProblemInstance& inst, const Matrix& K, double alpha,
                         double h = 1e-5) {
    const int m = inst.m(), n = inst.n();
    Matrix H(m * n, m * n);
    for (int col = 0; col < m * n; ++col) {
        Matrix Kp = K, Km = K;
        Kp.data()[col] += h;
        Km.data()[col] -= h;
        Matrix gp = gradient(inst, Kp, alpha);
        Matrix gm = gradient(inst, Km, alpha);
        Matrix diff = (gp - gm) / (2.0 * h);
        H.col(col) = Eigen::Map<Vector>(diff.data(), m * n);
    }
    return H;
}

}  // namespace odc::testutil
