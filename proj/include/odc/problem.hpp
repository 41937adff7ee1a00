#pragma once

#include <vector>

#include "odc/linalg.hpp"

namespace odc {

// 0/1 indicator of free gain entries. Feasible gains satisfy K .* mask = K.
struct SparsityMask {
    Matrix indicator;  // m x n, entries in {0,1}

    SparsityMask() = default;
    explicit SparsityMask(Matrix ind);

    static SparsityMask dense(int m, int n) { return SparsityMask(Matrix::Ones(m, n)); }
    static SparsityMask identity(int n) { return SparsityMask(Matrix::Identity(n, n)); }

    int rows() const { return static_cast<int>(indicator.rows()); }
    int cols() const { return static_cast<int>(indicator.cols()); }
    int free_count() const;

    // Column-major vec(K) indices of free entries, ascending.
    std::vector<int> free_indices() const;

    Matrix project(const Matrix& K) const { return K.cwiseProduct(indicator); }
    bool is_feasible(const Matrix& K, double tol = 0.0) const;
};

// Plant and cost data. Immutable after construction; validation happens here.
struct ProblemInstance {
    Matrix A;   // n x n
    Matrix B;   // n x m
    Matrix Q;   // n x n, symmetric PSD
    Matrix R;   // m x m, symmetric PD
    Matrix D0;  // n x n, symmetric PD initial-state covariance
    SparsityMask mask;

    ProblemInstance(Matrix A, Matrix B, Matrix Q, Matrix R, Matrix D0, SparsityMask mask);

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

// A structured gain. The optimization variable.
struct Controller {
    Matrix K;  // m x n, K .* mask = K enforced by the owning code path

    Controller() = default;
    explicit Controller(Matrix gain) : K(std::move(gain)) {}
};

}  // namespace odc
