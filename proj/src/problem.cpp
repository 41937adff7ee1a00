#include "odc/problem.hpp"

#include <Eigen/Eigenvalues>
#include <utility>

namespace odc {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw PreconditionError(msg);
}

bool symmetric(const Matrix& M, double tol = 1e-12) {
    return (M - M.transpose()).norm() <= tol * (1.0 + M.norm());
}

double min_eig_sym(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

SparsityMask::SparsityMask(Matrix ind) : indicator(std::move(ind)) {
    for (Eigen::Index i = 0; i < indicator.size(); ++i) {
        double v = indicator.data()[i];
        require(v == 0.0 || v == 1.0, "SparsityMask: entries must be 0 or 1");
    }
    require(indicator.rows() >= 1 && indicator.cols() >= 1, "SparsityMask: dimensions >= 1");
}

int SparsityMask::free_count() const {
    return static_cast<int>(indicator.sum());
}

std::vector<int> SparsityMask::free_indices() const {
    std::vector<int> out;
    out.reserve(free_count());
    const int m = rows(), n = cols();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            if (indicator(i, j) != 0.0) out.push_back(j * m + i);
        }
    }
    return out;
}

bool SparsityMask::is_feasible(const Matrix& K, double tol) const {
    if (K.rows() != indicator.rows() || K.cols() != indicator.cols()) return false;
    return (K - project(K)).norm() <= tol;
}

ProblemInstance::ProblemInstance(Matrix A_, Matrix B_, Matrix Q_, Matrix R_, Matrix D0_,
                                 SparsityMask mask_)
    : A(std::move(A_)), B(std::move(B_)), Q(std::move(Q_)), R(std::move(R_)), D0(std::move(D0_)),
      mask(std::move(mask_)) {
    require(A.rows() == A.cols() && A.rows() >= 1, "ProblemInstance: A must be square");
    const int nn = n();
    require(B.rows() == nn && B.cols() >= 1, "ProblemInstance: B row count must match A");
    const int mm = m();
    require(Q.rows() == nn && Q.cols() == nn, "ProblemInstance: Q must be n x n");
    require(R.rows() == mm && R.cols() == mm, "ProblemInstance: R must be m x m");
    require(D0.rows() == nn && D0.cols() == nn, "ProblemInstance: D0 must be n x n");
    require(mask.rows() == mm && mask.cols() == nn, "ProblemInstance: mask must be m x n");
    require(A.allFinite() && B.allFinite() && Q.allFinite() && R.allFinite() && D0.allFinite(),
            "ProblemInstance: non-finite entries");
    require(symmetric(Q), "ProblemInstance: Q must be symmetric");
    require(symmetric(R), "ProblemInstance: R must be symmetric");
    require(symmetric(D0), "ProblemInstance: D0 must be symmetric");
    require(min_eig_sym(Q) >= -1e-12, "ProblemInstance: Q must be positive semi-definite");
    require(min_eig_sym(R) > 0.0, "ProblemInstance: R must be positive definite");
    require(min_eig_sym(D0) > 0.0, "ProblemInstance: D0 must be positive definite");
}

}  // namespace odc
