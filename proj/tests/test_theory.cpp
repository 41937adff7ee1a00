#include <doctest.h>

#include <cmath>

#include "odc/theory.hpp"
#include "test_util.hpp"

using namespace odc;
using namespace odc::testutil;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

Matrix diag3(double a, double b, double c) {
    Matrix D = Matrix::Zero(3, 3);
    D(0, 0) = a; D(1, 1) = b; D(2, 2) = c;
    return D;
}

void check_certificate(const CounterexampleCertificate& cert, const Matrix& H) {
    CHECK((cert.H - H).norm() == 0.0);
    CHECK(cert.t0 > 0.0);
    CHECK(cert.abscissa_A < -1e-8);
    CHECK(cert.abscissa_At0H > 1e-8);
    // re-derive the abscissas independently of the certificate fields
    CHECK(spectral_abscissa(cert.A) == doctest::Approx(cert.abscissa_A).epsilon(1e-12));
    CHECK(spectral_abscissa(cert.A + cert.t0 * cert.H) ==
          doctest::Approx(cert.abscissa_At0H).epsilon(1e-12));
}

}  // namespace

TEST_CASE("damping check passes on the scalar grid") {
    ProblemInstance s = scalar_instance();
    auto res = check_damping_property(s, Matrix::Zero(1, 1), {0.0, 0.5, 1.0});
    CHECK(res.passed);
    // costs along the grid are 1/2, 1/3, 1/4
}

TEST_CASE("damping check rejects bad grids") {
    ProblemInstance s = scalar_instance();
    Matrix K = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(check_damping_property(s, K, {0.0}), PreconditionError);
    CHECK_THROWS_AS(check_damping_property(s, K, {1.0, 0.5}), PreconditionError);
    CHECK_THROWS_AS(check_damping_property(s, K, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("asymptotic collapse on the scalar problem") {
    ProblemInstance s = scalar_instance();
    SolverConfig cfg;
    cfg.grad_tol = 1e-7;  // the gradient scales like 1/alpha; keep K-slack small
    auto report = check_asymptotic_zero(s, {1.0, 100.0}, 20, cfg, 11);
    REQUIRE(report.max_gain_norm.size() == 2);
    CHECK(report.max_gain_norm[0] == doctest::Approx(-scalar_optimum(1.0)).epsilon(1e-3));
    CHECK(report.max_gain_norm[1] < report.max_gain_norm[0] / 10.0);
    CHECK(report.max_cost[1] < report.max_cost[0] / 10.0);
    CHECK(report.passed);
}

TEST_CASE("asymptotic check validates mask and R structure") {
    Matrix I2 = Matrix::Identity(2, 2);
    SolverConfig cfg;

    Matrix tri(2, 2);
    tri << 1, 1, 0, 1;  // upper-triangular pattern is not block-diagonal all-ones
    ProblemInstance bad_mask(-I2, I2, I2, I2, I2, SparsityMask(tri));
    CHECK_THROWS_AS(check_asymptotic_zero(bad_mask, {1.0, 10.0}, 5, cfg), PreconditionError);

    Matrix R(2, 2);
    R << 2, 1, 1, 2;  // PD but couples channels the diagonal mask separates
    ProblemInstance bad_r(-I2, I2, I2, R, I2, SparsityMask(I2));
    CHECK_THROWS_AS(check_asymptotic_zero(bad_r, {1.0, 10.0}, 5, cfg), PreconditionError);

    ProblemInstance wide(-I2, Matrix::Ones(2, 3), I2, Matrix::Identity(3, 3), I2,
                         SparsityMask::dense(3, 2));
    CHECK_THROWS_AS(check_asymptotic_zero(wide, {1.0, 10.0}, 5, cfg), PreconditionError);
}

TEST_CASE("hessian positive-definiteness over a sampled ball") {
    ProblemInstance s = scalar_instance();
    double min_eig = check_hessian_pd(s, 1.0, 10.0, 50, 13);
    CHECK(min_eig > 0.0);
    // A vanishing ball radius recovers the pointwise Hessian at K = 0.
    double at_zero = check_hessian_pd(s, 1e-8, 10.0, 5, 13);
    CHECK(at_zero == doctest::Approx(hessian(s, Matrix::Zero(1, 1), 10.0)(0, 0)).epsilon(1e-6));
}

TEST_CASE("hessian ball check throws when the ball destabilizes") {
    ProblemInstance s = scalar_instance();
    // radius 3 at alpha = 0 reaches k > 1, which destabilizes a + bk = -1 + k
    CHECK_THROWS_AS(check_hessian_pd(s, 3.0, 0.0, 50, 1), InstabilityError);
}

TEST_CASE("appendix-b lower bound is tight on the scalar problem") {
    ProblemInstance s = scalar_instance();
    auto res = check_appendix_b_bounds(s, Matrix::Zero(1, 1), 1.0);
    CHECK(res.lambda_min_ok);
    // L = 1/4 meets the bound 1/(2a + 2||A||) = 1/4 with equality
    CHECK(res.lambda_min_L == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(res.lambda_min_bound == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_FALSE(res.norm_bound_applicable);  // denominator -1/2 at this alpha
}

TEST_CASE("appendix-b norm bound applies at large alpha") {
    ProblemInstance s = scalar_instance();
    auto res = check_appendix_b_bounds(s, Matrix::Zero(1, 1), 10.0);
    CHECK(res.lambda_min_ok);
    CHECK(res.norm_bound_applicable);
    CHECK(res.norm_ok);
    CHECK(res.norm_L == doctest::Approx(1.0 / 22.0).epsilon(1e-12));
}

TEST_CASE("appendix-b bounds hold at random stabilizing points") {
    std::mt19937_64 rng(19);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        ProblemInstance inst = random_instance(3, 3, seed);
        auto K = find_stabilizing(inst, 1.0, rng);
        if (!K) continue;
        auto res = check_appendix_b_bounds(inst, *K, 1.0);
        CHECK(res.lambda_min_ok);
        if (res.norm_bound_applicable) CHECK(res.norm_ok);
    }
}

TEST_CASE("jordan-block direction certificate") {
    Matrix H = mat2(-1, 1, 0, -1);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
    CHECK((cert.A - mat2(-4, -2, 10, 3)).norm() == 0.0);
    CHECK(cert.t0 == 2.0);
}

TEST_CASE("nilpotent direction certificate") {
    Matrix H = mat2(0, 1, 0, 0);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
    CHECK((cert.A - mat2(-1, 0, 1, -1)).norm() == 0.0);
    CHECK(cert.t0 == 2.0);
}

TEST_CASE("rotation direction certificate") {
    Matrix H = mat2(0, 2, -2, 0);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
    CHECK(cert.t0 == doctest::Approx(1.0));  // 2/f with f = 2
}

TEST_CASE("complex-pair direction certificate") {
    Matrix H = mat2(-1, 1, -1, -1);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
}

TEST_CASE("diagonal rank-one direction certificate") {
    Matrix H = diag3(-1, 0, 0);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
}

TEST_CASE("diagonal rank-two direction certificate") {
    Matrix H = diag3(-1, -1, 0);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
}

TEST_CASE("diagonal full-rank direction certificate") {
    Matrix H = diag3(-1, -0.5, -0.25);
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
}

TEST_CASE("diagonal certificates are permutation- and padding-robust") {
    // same entries, different placement
    auto cert1 = stable_direction_counterexample(diag3(0, 0, -1));
    check_certificate(cert1, diag3(0, 0, -1));

    // 4x4 with an extra padded coordinate
    Matrix H4 = Matrix::Zero(4, 4);
    H4(0, 0) = -2.0; H4(1, 1) = -1.0; H4(2, 2) = -0.5; H4(3, 3) = 0.0;
    auto cert4 = stable_direction_counterexample(H4);
    check_certificate(cert4, H4);
    CHECK(cert4.A.rows() == 4);
}

TEST_CASE("diagonalizable direction reduces by similarity") {
    Matrix V(3, 3);
    V << 1, 1, 0,
         0, 1, 1,
         0, 0, 1;
    Matrix D = diag3(-1, -0.5, -0.25);
    Matrix H = V * D * V.inverse();
    auto cert = stable_direction_counterexample(H);
    check_certificate(cert, H);
}

TEST_CASE("identity multiples and unsupported forms are rejected") {
    CHECK_THROWS_AS(stable_direction_counterexample(-3.0 * Matrix::Identity(3, 3)),
                    NotACounterexampleError);
    CHECK_THROWS_AS(stable_direction_counterexample(-Matrix::Identity(2, 2)),
                    NotACounterexampleError);
    CHECK_THROWS_AS(stable_direction_counterexample(2.0 * Matrix::Identity(2, 2)),
                    UnsupportedStructureError);
    // diagonal with a positive entry
    CHECK_THROWS_AS(stable_direction_counterexample(diag3(-1, 0.5, 0)),
                    UnsupportedStructureError);
    // 2x2 outside the canonical forms
    CHECK_THROWS_AS(stable_direction_counterexample(mat2(-1, 2, 3, -4)),
                    UnsupportedStructureError);
    // malformed inputs
    CHECK_THROWS_AS(stable_direction_counterexample(Matrix::Zero(2, 3)), PreconditionError);
    CHECK_THROWS_AS(stable_direction_counterexample(Matrix::Zero(1, 1)), PreconditionError);
    Matrix nan2 = Matrix::Zero(2, 2);
    nan2(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(stable_direction_counterexample(nan2), PreconditionError);
}

TEST_CASE("disconnected t-set witnesses two components") {
    auto [t1, t2] = disconnected_t_set();
    CHECK(t1 < t2);

    // frozen rank-one family underlying the construction
    Matrix M(3, 3);
    M << 0, 1, 0,
         0, 0, 1,
         5, 1, -1;
    Vector b(3), c(3);
    b << 0, 0, -1;
    c << 0.85, 0.2, 0.2;
    Matrix D = b * c.transpose();
    CHECK(is_stable(M + t1 * D));
    CHECK_FALSE(is_stable(M + t2 * D));
    // a stable point beyond t2 certifies the stable set is disconnected
    CHECK(is_stable(M + 15.0 * D));
}
