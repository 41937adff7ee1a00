#include "odc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace odc {

double spectral_abscissa(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw PreconditionError("spectral_abscissa: matrix must be square");
    }
    if (!M.allFinite()) {
        throw PreconditionError("spectral_abscissa: matrix has non-finite entries");
    }
    Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw SolverFailure("spectral_abscissa: eigenvalue iteration did not converge");
    }
    return es.eigenvalues().real().maxCoeff();
}

bool is_stable(const Matrix& M, double tol) {
    return spectral_abscissa(M) < -tol;
}

StabilityReport stability_report(const Matrix& M, double tol) {
    double abscissa = spectral_abscissa(M);
    return {abscissa, abscissa < -tol, tol};
}

namespace {

// Shared core: solves Acl' X + X Acl + W = 0 via the dense vectorized system
// (I (x) Acl' + Acl' (x) I) vec(X) = -vec(W). Exact and cheap at the problem
// sizes this library targets (n <= ~30).
Matrix lyapunov_kron_solve(const Matrix& Acl, const Matrix& W, LyapunovInfo* info) {
    const int n = static_cast<int>(Acl.rows());
    if (Acl.cols() != n) {
        throw PreconditionError("solve_lyapunov: Acl must be square");
    }
    if (W.rows() != n || W.cols() != n) {
        throw PreconditionError("solve_lyapunov: W must match Acl's dimension");
    }
    double abscissa = spectral_abscissa(Acl);
    if (abscissa >= 0.0) {
        throw InstabilityError("solve_lyapunov: Acl is not stable", abscissa);
    }

    Matrix I = Matrix::Identity(n, n);
    Matrix At = Acl.transpose();
    Matrix coeff = kron(I, At) + kron(At, I);

    Eigen::PartialPivLU<Matrix> lu(coeff);
    Vector rhs = -Eigen::Map<const Vector>(W.data(), n * n);
    Vector x = lu.solve(rhs);
    Matrix X = Eigen::Map<const Matrix>(x.data(), n, n);

    double residual = (At * X + X * Acl + W).norm();
    double scale = 1.0 + W.norm();
    bool ill = residual > 1e-10 * scale;
    if (info) {
        info->residual = residual;
        info->ill_conditioned = ill;
    } else if (residual > 1e-6 * scale) {
        // No channel to attach a warning: refuse rather than return garbage.
        throw SolverFailure("solve_lyapunov: residual " + std::to_string(residual) +
                            " exceeds tolerance; system is severely ill-conditioned");
    }

    return 0.5 * (X + X.transpose());
}

}  // namespace

Matrix solve_lyapunov_obs(const Matrix& Acl, const Matrix& W, LyapunovInfo* info) {
    return lyapunov_kron_solve(Acl, W, info);
}

Matrix solve_lyapunov_ctrl(const Matrix& Acl, const Matrix& W, LyapunovInfo* info) {
    return lyapunov_kron_solve(Acl.transpose(), W, info);
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

Matrix commutation_matrix(int n) {
    Matrix P = Matrix::Zero(n * n, n * n);
    // vec(M)[j*n + i] = M(i,j); vec(M')[i*n + j] = M(i,j).
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            P(i * n + j, j * n + i) = 1.0;
        }
    }
    return P;
}

bool routh_hurwitz(const std::vector<double>& coeffs) {
    if (coeffs.empty() || coeffs.front() != 1.0) {
        throw PreconditionError("routh_hurwitz: coefficients must be monic, highest degree first");
    }
    const std::size_t degree = coeffs.size() - 1;
    if (degree == 1) {
        return coeffs[1] > 0.0;
    }
    if (degree == 2) {
        // x^2 + c1 x + c0: both roots in LHP iff c1 > 0 and c0 > 0.
        return coeffs[1] > 0.0 && coeffs[2] > 0.0;
    }
    if (degree == 3) {
        // x^3 + c2 x^2 + c1 x + c0: c2 > 0, c0 > 0, c2*c1 > c0.
        double c2 = coeffs[1], c1 = coeffs[2], c0 = coeffs[3];
        return c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0;
    }
    throw UnsupportedStructureError("routh_hurwitz: only degrees 1-3 are supported");
}

}  // namespace odc
