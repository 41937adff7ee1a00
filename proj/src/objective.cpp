#include "odc/objective.hpp"

#include <Eigen/Eigenvalues>

namespace odc {

Matrix closed_loop(const ProblemInstance& inst, const Matrix& K, double alpha) {
    return inst.A - alpha * Matrix::Identity(inst.n(), inst.n()) + inst.B * K;
}

double closed_loop_abscissa(const ProblemInstance& inst, const Matrix& K, double alpha) {
    return spectral_abscissa(closed_loop(inst, K, alpha));
}

bool is_stabilizing(const ProblemInstance& inst, const Matrix& K, double alpha, double tol) {
    return closed_loop_abscissa(inst, K, alpha) < -tol;
}

LyapunovPair lyapunov_pair(const ProblemInstance& inst, const Matrix& K, double alpha) {
    Matrix Acl = closed_loop(inst, K, alpha);
    double abscissa = spectral_abscissa(Acl);
    if (abscissa >= 0.0) {
        throw InstabilityError("lyapunov_pair: closed loop unstable", abscissa);
    }
    LyapunovPair pair;
    pair.P = solve_lyapunov_obs(Acl, inst.Q + K.transpose() * inst.R * K);
    pair.L = solve_lyapunov_ctrl(Acl, inst.D0);
    return pair;
}

double cost(const ProblemInstance& inst, const Matrix& K, double alpha) {
    Matrix Acl = closed_loop(inst, K, alpha);
    double abscissa = spectral_abscissa(Acl);
    if (abscissa >= 0.0) {
        throw InstabilityError("cost: closed loop unstable", abscissa);
    }
    Matrix P = solve_lyapunov_obs(Acl, inst.Q + K.transpose() * inst.R * K);
    return (inst.D0 * P).trace();
}

Matrix gradient(const ProblemInstance& inst, const Matrix& K, double alpha) {
    LyapunovPair pair = lyapunov_pair(inst, K, alpha);
    return 2.0 * (inst.B.transpose() * pair.P + inst.R * K) * pair.L;
}

Matrix projected_gradient(const ProblemInstance& inst, const Matrix& K, double alpha) {
    return inst.mask.project(gradient(inst, K, alpha));
}

double stationarity_residual(const ProblemInstance& inst, const Matrix& K, double alpha) {
    LyapunovPair pair = lyapunov_pair(inst, K, alpha);
    Matrix res = (inst.B.transpose() * pair.P + inst.R * K) * pair.L;
    return inst.mask.project(res).norm();
}

Evaluation evaluate(const ProblemInstance& inst, const Matrix& K, double alpha) {
    Evaluation ev;
    ev.pair = lyapunov_pair(inst, K, alpha);
    ev.cost = (inst.D0 * ev.pair.P).trace();
    ev.gradient = 2.0 * (inst.B.transpose() * ev.pair.P + inst.R * K) * ev.pair.L;
    ev.projected_gradient = inst.mask.project(ev.gradient);
    return ev;
}

Matrix hessian(const ProblemInstance& inst, const Matrix& K, double alpha) {
    const int n = inst.n();
    LyapunovPair pair = lyapunov_pair(inst, K, alpha);
    Matrix Acl = closed_loop(inst, K, alpha);
    Matrix In = Matrix::Identity(n, n);

    Matrix S = inst.B.transpose() * pair.P + inst.R * K;  // m x n
    Matrix lhs = kron(In, Acl) + kron(Acl, In);           // n^2 x n^2, nonsingular for stable Acl
    Matrix rhs = (Matrix::Identity(n * n, n * n) + commutation_matrix(n)) * kron(pair.L, inst.B);

    Eigen::PartialPivLU<Matrix> lu(lhs);
    Matrix inner = lu.solve(rhs);  // n^2 x (m*n)
    if (!inner.allFinite()) {
        throw SolverFailure("hessian: ill-conditioned closed-loop Sylvester operator");
    }

    // Minus sign: perturbing K moves P through the inverse of the (negative
    // definite) closed-loop Sylvester operator. Pinned by the scalar closed
    // form and the finite-difference oracle.
    Matrix G = -kron(In, S) * inner;                        // (m*n) x (m*n)
    Matrix H = 2.0 * (kron(pair.L, inst.R) + G.transpose() + G);
    return 0.5 * (H + H.transpose());
}

Matrix projected_hessian(const ProblemInstance& inst, const Matrix& K, double alpha) {
    Matrix H = hessian(inst, K, alpha);
    std::vector<int> idx = inst.mask.free_indices();
    Matrix Hp(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) {
            Hp(a, b) = H(idx[a], idx[b]);
        }
    }
    return Hp;
}

}  // namespace odc
