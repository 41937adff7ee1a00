#include <doctest.h>

#include <random>

#include "odc/linalg.hpp"

using namespace odc;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

// Random matrix shifted to a prescribed spectral abscissa.
Matrix random_stable(int n, std::mt19937_64& rng, double target_abscissa = -0.5) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
    }
    return M + (target_abscissa - spectral_abscissa(M)) * Matrix::Identity(n, n);
}

// Independent dense oracle: vectorized solve of A' X + X A + W = 0.
Matrix lyapunov_oracle(const Matrix& A, const Matrix& W) {
    const int n = static_cast<int>(A.rows());
    Matrix At = A.transpose();
    Matrix coeff = kron(Matrix::Identity(n, n), At) + kron(At, Matrix::Identity(n, n));
    Vector rhs = -Eigen::Map<const Vector>(W.data(), n * n);
    Vector x = coeff.fullPivLu().solve(rhs);
    return Eigen::Map<const Matrix>(x.data(), n, n);
}

std::vector<double> char_poly(const Matrix& M) {
    const int n = static_cast<int>(M.rows());
    if (n == 2) {
        return {1.0, -M.trace(), M.determinant()};
    }
    // n == 3: x^3 - tr x^2 + (sum of principal 2x2 minors) x - det
    double c1 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) + M(0, 0) * M(2, 2) -
                M(0, 2) * M(2, 0) + M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    return {1.0, -M.trace(), c1, -M.determinant()};
}

}  // namespace

TEST_CASE("spectral abscissa on known matrices") {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = -2.0;
    CHECK(spectral_abscissa(D) == doctest::Approx(-1.0));

    // companion of x^2 + 3x + 2, eigenvalues -1 and -2
    CHECK(spectral_abscissa(mat2(0, 1, -2, -3)) == doctest::Approx(-1.0));

    // triangular, eigenvalues -6 and 1
    CHECK(spectral_abscissa(mat2(-6, 0, 10, 1)) == doctest::Approx(1.0));
}

TEST_CASE("spectral abscissa rejects bad input") {
    CHECK_THROWS_AS(spectral_abscissa(Matrix::Zero(2, 3)), PreconditionError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectral_abscissa(bad), PreconditionError);
}

TEST_CASE("is_stable") {
    CHECK(is_stable(-Matrix::Identity(3, 3), 0.0));
    // Appendix-D stable pick with h = -1
    CHECK(is_stable(mat2(-4, -2, 10, 3), 0.0));
    CHECK_FALSE(is_stable(Matrix::Zero(2, 2), 0.0));
    CHECK_FALSE(is_stable(-Matrix::Identity(2, 2), 1.5));
}

TEST_CASE("stability report is consistent") {
    auto rep = stability_report(-Matrix::Identity(2, 2), 1e-9);
    CHECK(rep.is_stable == (rep.spectral_abscissa < -rep.margin_tolerance));
    CHECK(rep.spectral_abscissa == doctest::Approx(-1.0));
}

TEST_CASE("lyapunov solve on decoupled diagonal system") {
    Matrix Acl = Matrix::Zero(2, 2);
    Acl(0, 0) = -1.0;
    Acl(1, 1) = -2.0;
    Matrix X = solve_lyapunov_obs(Acl, Matrix::Identity(2, 2));
    CHECK(X(0, 0) == doctest::Approx(0.5));
    CHECK(X(1, 1) == doctest::Approx(0.25));
    CHECK(X(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("lyapunov solve with Acl = -I") {
    Matrix X = solve_lyapunov_obs(-Matrix::Identity(4, 4), Matrix::Identity(4, 4));
    CHECK((X - 0.5 * Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("lyapunov solve matches hand-solved 2x2 system") {
    // Acl = [[0,1],[-2,-3]], W = I: x12 = 1/4, x22 = 1/4, x11 = 5/4
    Matrix Acl = mat2(0, 1, -2, -3);
    Matrix W = Matrix::Identity(2, 2);
    Matrix X = solve_lyapunov_obs(Acl, W);
    CHECK(X(0, 0) == doctest::Approx(1.25));
    CHECK(X(0, 1) == doctest::Approx(0.25));
    CHECK(X(1, 1) == doctest::Approx(0.25));
    CHECK((Acl.transpose() * X + X * Acl + W).norm() <= 1e-10 * (1.0 + W.norm()));
}

TEST_CASE("lyapunov ctrl variant") {
    Matrix Acl = Matrix::Zero(2, 2);
    Acl(0, 0) = -1.0;
    Acl(1, 1) = -2.0;
    Matrix X = solve_lyapunov_ctrl(Acl, Matrix::Identity(2, 2));
    CHECK(X(0, 0) == doctest::Approx(0.5));
    CHECK(X(1, 1) == doctest::Approx(0.25));

    // symmetric Acl: both variants agree
    Matrix S = mat2(-2, 0.3, 0.3, -1.5);
    CHECK((solve_lyapunov_ctrl(S, Matrix::Identity(2, 2)) -
           solve_lyapunov_obs(S, Matrix::Identity(2, 2)))
              .norm() < 1e-12);

    // -I + strictly upper triangular ones, checked against the Kronecker oracle
    Matrix N = Matrix::Zero(3, 3);
    N(0, 1) = N(0, 2) = N(1, 2) = 1.0;
    Matrix Acl3 = -Matrix::Identity(3, 3) + N;
    Matrix X3 = solve_lyapunov_ctrl(Acl3, Matrix::Identity(3, 3));
    Matrix oracle = lyapunov_oracle(Acl3.transpose(), Matrix::Identity(3, 3));
    CHECK((X3 - oracle).norm() < 1e-9 * oracle.norm());
}

TEST_CASE("lyapunov solver refuses unstable Acl") {
    CHECK_THROWS_AS(solve_lyapunov_obs(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                    InstabilityError);
}

TEST_CASE("lyapunov info reports residual") {
    LyapunovInfo info;
    solve_lyapunov_obs(-Matrix::Identity(2, 2), Matrix::Identity(2, 2), &info);
    CHECK(info.residual <= 1e-12);
    CHECK_FALSE(info.ill_conditioned);
}

TEST_CASE("lyapunov output is symmetric PSD for PSD W") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4);  // 2..5
        Matrix Acl = random_stable(n, rng);
        Matrix G = random_stable(n, rng);
        Matrix W = G * G.transpose();  // PSD
        Matrix X = solve_lyapunov_obs(Acl, W);
        CHECK((X - X.transpose()).norm() <= 1e-12 * (1.0 + X.norm()));
        Eigen::SelfAdjointEigenSolver<Matrix> es(X, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + X.norm()));
        // Kronecker-oracle equivalence
        Matrix oracle = lyapunov_oracle(Acl, W);
        CHECK((X - oracle).norm() <= 1e-9 * (1.0 + oracle.norm()));
    }
}

TEST_CASE("kron basics") {
    CHECK((kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) - Matrix::Identity(4, 4)).norm() ==
          0.0);
    Matrix D1 = Matrix::Zero(2, 2), D2 = Matrix::Zero(2, 2);
    D1(0, 0) = 1; D1(1, 1) = 2;
    D2(0, 0) = 3; D2(1, 1) = 4;
    Matrix K = kron(D1, D2);
    Vector expected(4);
    expected << 3, 4, 6, 8;
    CHECK((K.diagonal() - expected).norm() == 0.0);
    CHECK(K.sum() == doctest::Approx(21.0));
}

TEST_CASE("commutation matrix transposes vec") {
    Matrix M = mat2(1, 2, 3, 4);
    Matrix P = commutation_matrix(2);
    Vector v = Eigen::Map<Vector>(M.data(), 4);
    Matrix Mt = M.transpose();
    Vector vt = Eigen::Map<Vector>(Mt.data(), 4);
    CHECK((P * v - vt).norm() == 0.0);
}

TEST_CASE("commutation matrix is an orthogonal involution") {
    for (int n : {2, 3, 4}) {
        Matrix P = commutation_matrix(n);
        CHECK((P * P - Matrix::Identity(n * n, n * n)).norm() == 0.0);
        CHECK((P * P.transpose() - Matrix::Identity(n * n, n * n)).norm() == 0.0);
    }
}

TEST_CASE("routh-hurwitz on known polynomials") {
    CHECK(routh_hurwitz({1.0, 3.0, 2.0}));        // x^2 + 3x + 2
    CHECK_FALSE(routh_hurwitz({1.0, -1.0, 2.0}));

    // cubic family x^3 + (t - t*h2) x^2 + (h2 - t^2 h2) x + (t-2) h2, h2 = -1
    auto cubic = [](double t, double h2) {
        return std::vector<double>{1.0, t - t * h2, h2 - t * t * h2, (t - 2.0) * h2};
    };
    CHECK(routh_hurwitz(cubic(1.5, -1.0)));
    CHECK_FALSE(routh_hurwitz(cubic(3.0, -1.0)));
}

TEST_CASE("routh-hurwitz rejects unsupported input") {
    CHECK_THROWS_AS(routh_hurwitz({1.0, 1.0, 1.0, 1.0, 1.0}), UnsupportedStructureError);
    CHECK_THROWS_AS(routh_hurwitz({2.0, 1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(routh_hurwitz({}), PreconditionError);
}

TEST_CASE("routh-hurwitz agrees with eigenvalues on random matrices") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    int tested = 0;
    while (tested < 200) {
        int n = 2 + static_cast<int>(rng() % 2);
        Matrix M(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
        }
        double abscissa = spectral_abscissa(M);
        if (std::abs(abscissa) < 1e-6) continue;  // keep away from the axis
        CHECK(routh_hurwitz(char_poly(M)) == is_stable(M, 0.0));
        ++tested;
    }
}
