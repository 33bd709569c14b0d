#include <doctest.h>

#include <cmath>

#include "cfbkit/curvature.hpp"
#include "cfbkit/oracle.hpp"

using namespace cfbkit;

namespace {

double closed(double lam, cplx w) { return -lam / std::pow(1.0 - std::norm(w), 2); }

CfbOperator pair_operator(double l1, double l2, const AnalyticSymbol& phi, int N) {
    CfbSpec s;
    s.kernels = {lambda_kernel(l1, N + 1), lambda_kernel(l2, N + 1)};
    s.superdiag = {phi};
    s.N = N;
    return build_cfb(s);
}

}  // namespace

TEST_CASE("rank-1 curvature spot values") {
    CHECK(curvature_rank1(lambda_kernel(1.0, 8), {0.0}).values[0].real() == doctest::Approx(-1.0));
    CHECK(curvature_rank1(lambda_kernel(2.0, 8), {0.5}).values[0].real() == doctest::Approx(-32.0 / 9.0));
    const auto fd = curvature_rank1(lambda_kernel(2.0, 8), {0.5}, CurvatureMethod::FiniteDifference);
    CHECK(fd.source == FieldSource::FiniteDifference);
    CHECK(std::abs(fd.values[0].real() + 32.0 / 9.0) < 1e-6 * 32.0 / 9.0);
    CHECK_THROWS_AS(curvature_rank1(DiagonalKernel::from_coeffs({1, 2, 3}), {0.0}, CurvatureMethod::ClosedForm), Error);
}

TEST_CASE("finite-difference curvature matches the closed form") {
    const auto grid = disk_grid(0.8, 21);
    for (double lam : {1.0, 1.5, 2.0, 3.0}) {
        const auto f = curvature_rank1(lambda_kernel(lam, 8), grid, CurvatureMethod::FiniteDifference);
        double worst = 0.0;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const double c = closed(lam, grid[p]);
            worst = std::max(worst, std::abs(f.values[p].real() - c) / std::abs(c));
            CHECK(f.values[p].real() < 0.0);
            CHECK(f.values[p].imag() == 0.0);
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("coefficient kernels use the stencil") {
    std::vector<double> a(600);
    for (std::size_t n = 0; n < a.size(); ++n) a[n] = n + 1.0;
    const auto k = DiagonalKernel::from_coeffs(a);
    const auto f = curvature_rank1(k, {cplx(0.3, -0.2)});
    CHECK(f.source == FieldSource::FiniteDifference);
    CHECK(std::abs(f.values[0].real() - closed(2.0, cplx(0.3, -0.2))) < 1e-6);

    std::vector<double> scaled = a;
    for (double& x : scaled) x *= 7.5;
    const auto g = curvature_rank1(DiagonalKernel::from_coeffs(scaled), {cplx(0.3, -0.2)});
    CHECK(std::abs(g.values[0] - f.values[0]) <= 1e-12);
}

TEST_CASE("curvature differences") {
    const auto grid = disk_grid(0.7, 7);
    const auto a = curvature_rank1(lambda_kernel(1.0, 8), grid);
    const auto b = curvature_rank1(lambda_kernel(1.0, 8), grid);
    const auto c = curvature_rank1(lambda_kernel(2.5, 8), grid, CurvatureMethod::FiniteDifference);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        CHECK(a.values[p] == b.values[p]);
        const double expect = -(1.0 - 2.5) / std::pow(1.0 - std::norm(grid[p]), 2);
        CHECK(std::abs((a.values[p] - c.values[p]).real() - expect) < 1e-5);
    }
}

TEST_CASE("curvature agrees with the independent stencil oracle") {
    const double h = 1e-3;
    const int n = 41;
    const auto k = lambda_kernel(1.5, 8);
    Eigen::MatrixXd vals(n, n);
    const double x0 = 0.3 - 20 * h, y0 = -0.1 - 20 * h;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) vals(y, x) = std::log(k.eval(cplx(x0 + x * h, y0 + y * h)));
    const auto o = fd_dbar_dlog(vals, h);
    const auto f = curvature_rank1(k, {cplx(0.3, -0.1)}, CurvatureMethod::FiniteDifference);
    CHECK(std::abs(-o(20, 20) - f.values[0].real()) < 1e-5);
}

TEST_CASE("grid margin") {
    CHECK_THROWS_AS(curvature_rank1(lambda_kernel(1.0, 8), {0.97}), Error);
}

TEST_CASE("covariant derivatives") {
    const auto k = lambda_kernel(2.0, 8);
    const auto base = curvature_rank1(k, {0.0, 0.5});
    const auto dbar = covariant_derivative(base, k, Direction::WBar);
    CHECK(std::abs(dbar.values[0]) < 1e-9);
    const double expect = -2.0 * 2.0 * 0.5 / std::pow(0.75, 3);
    CHECK(std::abs(dbar.values[1] - expect) < 1e-6 * std::abs(expect));
    CHECK(dbar.order_wbar() == 1);
    CHECK(dbar.order_w() == 0);

    const auto g = curvature_rank1(k, {cplx(0.2, 0.1)});
    const auto wb = covariant_derivative(covariant_derivative(g, k, Direction::W), k, Direction::WBar);
    const auto bw = covariant_derivative(covariant_derivative(g, k, Direction::WBar), k, Direction::W);
    CHECK(std::abs(wb.values[0] - bw.values[0]) < 1e-6);
    CHECK_THROWS_AS(covariant_derivative(wb, k, Direction::W), Error);

    const auto fd = curvature_rank1(k, {0.5}, CurvatureMethod::FiniteDifference);
    const auto fdd = covariant_derivative(fd, k, Direction::WBar, 1);
    CHECK(std::abs(fdd.values[0] - expect) < 1e-4 * std::abs(expect));
}

TEST_CASE("classical second fundamental form") {
    const auto k = lambda_kernel(1.0, 8);
    const Mat B = symbol_operator(AnalyticSymbol::constant(1.0), k, k, 32);
    const auto s = sff_classical(k, B, k, {0.0});
    CHECK(s.values[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(s.variant == SffVariant::Classical);
}

TEST_CASE("generalized second fundamental form closed form") {
    const auto grid = disk_grid(0.7, 15);
    const std::vector<AnalyticSymbol> syms = {AnalyticSymbol::constant(1.0), AnalyticSymbol::identity(),
                                              AnalyticSymbol::from_roots({0.5, 0.5}, 1.0)};
    for (const auto& [l1, l2] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.5, 1.5}, {2.0, 3.5}})
        for (const auto& phi : syms) {
            const auto T = pair_operator(l1, l2, phi, 64);
            const auto f = sff_generalized(T, 0, grid);
            for (std::size_t p = 0; p < grid.size(); ++p) {
                const cplx w = grid[p];
                const double expect = std::norm(phi.conj_eval(w)) * std::pow(1.0 - std::norm(w), l2 - l1);
                CHECK(std::abs(f.values[p] - expect) <= 1e-6);
                CHECK(f.values[p] >= 0.0);
            }
        }
    const auto Z = pair_operator(1.0, 1.0, AnalyticSymbol::constant(0.0), 16);
    const auto U = pair_operator(1.0, 1.0, AnalyticSymbol::constant(1.0), 16);
    for (double v : sff_generalized(Z, 0, grid).values) CHECK(v == 0.0);
    for (double v : sff_generalized(U, 0, grid).values) CHECK(v == doctest::Approx(1.0));
    CHECK_THROWS_AS(sff_generalized(U, 1, grid), Error);
}

TEST_CASE("rank-n curvature") {
    const auto k1 = lambda_kernel(1.0, 8), k2 = lambda_kernel(2.0, 8);
    const int N = 48;
    const Frame diag = [&](cplx w) {
        Mat F = Mat::Zero(2 * N, 2);
        F.col(0).head(N) = section(k1, w, N).coords;
        F.col(1).tail(N) = section(k2, w, N).coords;
        return F;
    };
    const std::vector<cplx> grid = {0.0, cplx(0.3, 0.2)};
    const auto K = curvature_rank_n(diag, grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        CHECK(std::abs(K.values[p](0, 0).real() - closed(1.0, grid[p])) < 1e-5);
        CHECK(std::abs(K.values[p](1, 1).real() - closed(2.0, grid[p])) < 1e-5);
        CHECK(std::abs(K.values[p](0, 1)) < 1e-6);
    }

    const Frame one = [&](cplx w) {
        Mat F(N, 1);
        F.col(0) = section(k1, w, N).coords;
        return F;
    };
    const auto K1 = curvature_rank_n(one, {cplx(0.4, 0.0)});
    CHECK(std::abs(K1.values[0](0, 0).real() - closed(1.0, 0.4)) < 1e-5);

    const auto phi = AnalyticSymbol::polynomial({-0.5, 1.0});
    const Frame upper = [&](cplx w) {
        Mat F = Mat::Zero(2 * N, 2);
        F.col(0).head(N) = section(k1, w, N).coords;
        Vec d(N);
        for (int n = 0; n < N; ++n) d(n) = n == 0 ? cplx(0.0) : std::sqrt(k1.coeff(n)) * double(n) * std::pow(w, n - 1);
        F.col(1).head(N) = -phi.conj_eval(w) * d;
        F.col(1).tail(N) = section(k2, w, N).coords;
        return F;
    };
    const auto Ku = curvature_rank_n(upper, {0.0});
    CHECK(Ku.values[0].trace().real() <= closed(1.0, 0.0) + closed(2.0, 0.0) + 1e-6);

    const Frame bad = [&](cplx w) {
        Mat F(N, 2);
        F.col(0) = section(k1, w, N).coords;
        F.col(1) = F.col(0);
        return F;
    };
    CHECK_THROWS_AS(curvature_rank_n(bad, {0.1}), Error);

    const auto D = covariant_derivative(K, diag, Direction::WBar);
    CHECK(std::abs(D.values[0](0, 0)) < 1e-4);
    CHECK(D.history.size() == 1);
}

TEST_CASE("curvature CSV") {
    const auto f = curvature_rank1(lambda_kernel(1.0, 8), {0.0, 0.5});
    const auto csv = to_csv(f);
    CHECK(csv.rfind("re_w,im_w,re_value,im_value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
