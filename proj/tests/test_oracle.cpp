#include <doctest.h>

#include <random>

#include "cfbkit/oracle.hpp"
#include "cfbkit/shifts.hpp"

using namespace cfbkit;

namespace {

Mat random_matrix(int r, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

}  // namespace

TEST_CASE("Sylvester solve on diagonal data") {
    Mat A = Mat::Zero(2, 2), B = Mat::Zero(2, 2);
    A.diagonal() << 1.0, 2.0;
    B.diagonal() << 3.0, 4.0;
    const auto s = sylvester_solve(A, B, Mat::Ones(2, 2));
    Mat expect(2, 2);
    expect << -0.5, -1.0 / 3.0, -1.0, -0.5;
    CHECK((s.X - expect).norm() <= 1e-14);
    CHECK(s.report.residual <= 1e-14);
    CHECK(s.report.nullity == 0);
    CHECK(s.null_basis.cols() == 0);

    const auto z = sylvester_solve(A, B, Mat::Zero(2, 2));
    CHECK(z.X.norm() == 0.0);
}

TEST_CASE("Sylvester solve reproduces a consistent right-hand side") {
    const Mat A = random_matrix(4, 4, 1), B = random_matrix(3, 3, 2), X = random_matrix(4, 3, 3);
    const auto s = sylvester_solve(A, B, A * X - X * B);
    CHECK((s.X - X).norm() <= 1e-10 * X.norm());
    CHECK(s.report.residual <= 1e-12);
}

TEST_CASE("minimum-norm solution is orthogonal to the null space") {
    Mat A = Mat::Zero(3, 3);
    A(0, 1) = 1.0;
    A(1, 2) = 1.0;
    const Mat X0 = random_matrix(3, 3, 5);
    const auto s = sylvester_solve(A, A, A * X0 - X0 * A);
    CHECK(s.report.nullity == 3);
    CHECK(s.null_basis.cols() == 3);
    CHECK(s.report.residual <= 1e-12);
    const Vec x = Eigen::Map<const Vec>(s.X.data(), s.X.size());
    CHECK((s.null_basis.adjoint() * x).norm() <= 1e-12);
    for (int k = 0; k < 3; ++k) {
        const Mat N = Eigen::Map<const Mat>(s.null_basis.col(k).data(), 3, 3);
        CHECK((A * N - N * A).norm() <= 1e-12);
    }
}

TEST_CASE("intertwiner search") {
    const Mat T = shift_from_kernel(lambda_kernel(2, 8), 6).matrix;
    const auto s = direct_intertwiner(T, T, Structure::Full, 6);
    CHECK(s.found);
    CHECK(!s.basis.empty());
    CHECK((s.best * T - T * s.best).norm() <= 1e-10 * s.best.norm());
    CHECK(s.best_condition < 1e12);

    const auto again = direct_intertwiner(T, T, Structure::Full, 6);
    CHECK((again.best - s.best).norm() == 0.0);

    Mat D1 = Mat::Zero(2, 2), D2 = Mat::Zero(2, 2);
    D1.diagonal() << 1.0, 2.0;
    D2.diagonal() << 3.0, 4.0;
    try {
        direct_intertwiner(D1, D2, Structure::Full, 2);
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotFound);
    }
}

TEST_CASE("structured solve respects the structure") {
    const Mat T = random_matrix(4, 4, 8), Tt = random_matrix(4, 4, 9), C = random_matrix(4, 4, 10);
    const auto d = solve_structured(T, Tt, C, Structure::Diagonal, 2);
    CHECK(d.X.block(0, 2, 2, 2).norm() == 0.0);
    CHECK(d.X.block(2, 0, 2, 2).norm() == 0.0);
    const auto u = solve_structured(T, Tt, C, Structure::StrictUpper, 2);
    CHECK(u.X.block(0, 0, 2, 2).norm() == 0.0);
    CHECK(u.X.block(2, 2, 2, 2).norm() == 0.0);
    CHECK(u.X.block(2, 0, 2, 2).norm() == 0.0);
    const auto f = solve_structured(T, Tt, C, Structure::Full, 2);
    CHECK((f.X * T - Tt * f.X - C).norm() <= 1e-10 * C.norm());
}

TEST_CASE("finite-difference ddbar of log") {
    const double h = 1e-3;
    CHECK(std::abs(fd_dbar_dlog([](cplx) { return 5.0; }, 0.3, h)) <= 1e-8);
    // Input is already the logarithm of the kernel diagonal.
    const double v = fd_dbar_dlog([](cplx w) { return -std::log(1.0 - std::norm(w)); }, cplx(0.5, 0.0), h);
    CHECK(v == doctest::Approx(16.0 / 9.0).epsilon(1e-7));
    CHECK(fd_dbar_dlog([](cplx w) { return std::norm(w); }, cplx(0.1, 0.2), h) == doctest::Approx(1.0).epsilon(1e-7));

    const int n = 41;
    const double step = 0.02;
    Eigen::MatrixXd field(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const cplx w((c - 20) * step, (r - 20) * step);
            field(r, c) = -std::log(1.0 - std::norm(w));
        }
    const auto g = fd_dbar_dlog(field, step);
    CHECK(g(0, 0) == 0.0);
    CHECK(g(1, 5) == 0.0);
    CHECK(g(20, 20) == doctest::Approx(1.0).epsilon(1e-3));
    const cplx w(5 * step, -3 * step);
    CHECK(g(17, 25) == doctest::Approx(std::pow(1.0 - std::norm(w), -2.0)).epsilon(1e-3));
}
