#pragma once

#include "odc/problem.hpp"

namespace odc {

// Value matrix P and covariance matrix L of the damped closed loop.
struct LyapunovPair {
    Matrix P;  // solves Acl' P + P Acl + Q + K'RK = 0
    Matrix L;  // solves Acl L + L Acl' + D0 = 0
};

// A - alpha*I + B*K.
Matrix closed_loop(const ProblemInstance& inst, const Matrix& K, double alpha);

// Spectral abscissa of the damped closed loop.
double closed_loop_abscissa(const ProblemInstance& inst, const Matrix& K, double alpha);

bool is_stabilizing(const ProblemInstance& inst, const Matrix& K, double alpha,
                    double tol = 1e-9);

// Both Lyapunov solutions at (K, alpha). Throws InstabilityError if the
// closed loop is not stable.
LyapunovPair lyapunov_pair(const ProblemInstance& inst, const Matrix& K, double alpha);

// J(K, alpha) = tr(D0 * P).
double cost(const ProblemInstance& inst, const Matrix& K, double alpha);

// Unprojected policy gradient 2*(B'P + RK)*L, an m x n matrix.
Matrix gradient(const ProblemInstance& inst, const Matrix& K, double alpha);

// Gradient with masked entries zeroed.
Matrix projected_gradient(const ProblemInstance& inst, const Matrix& K, double alpha);

// Frobenius norm of ((B'P + RK)*L) .* mask, the first-order stationarity residual.
double stationarity_residual(const ProblemInstance& inst, const Matrix& K, double alpha);

// Full (m*n) x (m*n) Hessian of J with respect to vec(K) (column-major),
// symmetrized. H = 2*{ L (x) R + G' + G } with
// G = [I (x) (B'P+RK)] [I (x) Acl + Acl (x) I]^{-1} (I + P(n,n)) [L (x) B].
Matrix hessian(const ProblemInstance& inst, const Matrix& K, double alpha);

// Principal submatrix of the Hessian on the mask's free vec(K) indices.
Matrix projected_hessian(const ProblemInstance& inst, const Matrix& K, double alpha);

// Cost/gradient evaluation bundle for callers that need several quantities
// from one pair of Lyapunov solves.
struct Evaluation {
    double cost;
    Matrix gradient;            // unprojected
    Matrix projected_gradient;
    LyapunovPair pair;
};

Evaluation evaluate(const ProblemInstance& inst, const Matrix& K, double alpha);

}  // namespace odc
