#include "odc/instances.hpp"

#include <random>

namespace odc {

ProblemInstance paper_4x4() {
    Matrix A(4, 4), B(4, 4);
    A << -1.0,  2.0,  0.0,  0.0,
         -2.0,  0.0,  1.0,  0.0,
          0.0, -1.0,  0.0,  2.0,
          0.0,  0.0, -2.0,  0.0;
    B <<  0.0,  1.0,  0.0,  0.0,
         -1.0,  0.0,  1.0,  0.0,
          0.0, -1.0,  0.0,  1.0,
          0.0,  0.0, -1.0,  0.0;
    Matrix I = Matrix::Identity(4, 4);
    return ProblemInstance(A, B, I, I, I, SparsityMask::identity(4));
}

ProblemInstance random_instance(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 1) throw PreconditionError("random_instance: n, m must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(n, n), B(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) B(i, j) = normal(rng);
    }
    Matrix mask = Matrix::Zero(m, n);
    for (int i = 0; i < std::min(m, n); ++i) mask(i, i) = 1.0;
    return ProblemInstance(A, B, Matrix::Identity(n, n), Matrix::Identity(m, m),
                           Matrix::Identity(n, n), SparsityMask(mask));
}

}  // namespace odc
