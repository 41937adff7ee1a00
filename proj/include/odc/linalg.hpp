#pragma once

#include <Eigen/Dense>
#include <vector>

#include "odc/errors.hpp"

namespace odc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct StabilityReport {
    double spectral_abscissa;
    bool is_stable;
    double margin_tolerance;
};

// Diagnostics a Lyapunov solve can attach to its result.
struct LyapunovInfo {
    double residual = 0.0;       // ||A'X + XA + W||_F
    bool ill_conditioned = false;
};

// Max real part over the eigenvalues of M.
double spectral_abscissa(const Matrix& M);

// True iff spectral_abscissa(M) < -tol.
bool is_stable(const Matrix& M, double tol = 0.0);

StabilityReport stability_report(const Matrix& M, double tol = 0.0);

// Solves Acl' X + X Acl + W = 0 for symmetric X (observability form).
// Acl must be stable; W symmetric. Result is symmetrized.
Matrix solve_lyapunov_obs(const Matrix& Acl, const Matrix& W, LyapunovInfo* info = nullptr);

// Solves Acl X + X Acl' + W = 0 (controllability form).
Matrix solve_lyapunov_ctrl(const Matrix& Acl, const Matrix& W, LyapunovInfo* info = nullptr);

Matrix kron(const Matrix& A, const Matrix& B);

// P(n,n) with P * vec(M) = vec(M') for all n-by-n M (column-major vec).
Matrix commutation_matrix(int n);

// Monic characteristic polynomial coefficients, highest degree first.
// Degree 2: [1, c1, c0]; degree 3: [1, c2, c1, c0].
// True iff all roots lie strictly in the open left half plane.
bool routh_hurwitz(const std::vector<double>& coeffs);

}  // namespace odc
