#include "cfbkit/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

namespace cfbkit {

namespace {

constexpr int kOracleDimCap = 64;
constexpr Eigen::Index kUnknownCap = 4096;

struct Entry {
    Eigen::Index r, c;
};

std::vector<Entry> allowed_entries(Eigen::Index dim, Structure s, int b) {
    std::vector<Entry> out;
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) {
            const Eigen::Index bi = r / b, bj = c / b;
            if (s == Structure::StrictUpper && bj <= bi) continue;
            if (s == Structure::Diagonal && bi != bj) continue;
            out.push_back({r, c});
        }
    return out;
}

// Column k holds vec(E_k T - Tt E_k) for the k-th admissible unit matrix E_k.
Mat intertwining_columns(const Mat& T, const Mat& Tt, const std::vector<Entry>& entries) {
    const Eigen::Index n = T.rows();
    Mat L = Mat::Zero(n * n, static_cast<Eigen::Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [r, c] = entries[k];
        Mat img = Mat::Zero(n, n);
        img.row(r) += T.row(c);
        img.col(c) -= Tt.col(r);
        L.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vec>(img.data(), n * n);
    }
    return L;
}

Mat scatter(const Vec& x, const std::vector<Entry>& entries, Eigen::Index n) {
    Mat X = Mat::Zero(n, n);
    for (std::size_t k = 0; k < entries.size(); ++k) X(entries[k].r, entries[k].c) = x(static_cast<Eigen::Index>(k));
    return X;
}

struct SvdSolve {
    Vec x;
    Mat null_basis;
    LinearSolveReport report;
};

SvdSolve min_norm_solve(const Mat& L, const Vec& rhs) {
    Eigen::BDCSVD<Mat> svd(L, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * (s.size() ? s(0) : 0.0);
    int r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    SvdSolve out;
    Vec coef = svd.matrixU().leftCols(r).adjoint() * rhs;
    for (int i = 0; i < r; ++i) coef(i) /= s(i);
    out.x = svd.matrixV().leftCols(r) * coef;
    out.null_basis = svd.matrixV().rightCols(L.cols() - r);
    out.report.rank = r;
    out.report.nullity = static_cast<int>(L.cols()) - r;
    out.report.solution_dim = out.report.nullity;
    out.report.condition = r > 0 ? s(0) / s(r - 1) : std::numeric_limits<double>::infinity();
    out.report.residual = (L * out.x - rhs).norm() / std::max(1.0, rhs.norm());
    return out;
}

Mat tau_columns(const Mat& A, const Mat& B) {
    const Eigen::Index n = A.rows(), m = B.rows();
    Mat L(n * m, n * m);
    for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r < n; ++r) {
            Mat E = Mat::Zero(n, m);
            E(r, c) = 1.0;
            const Mat img = A * E - E * B;
            L.col(c * n + r) = Eigen::Map<const Vec>(img.data(), n * m);
        }
    return L;
}

double composed_ddbar(const std::function<double(cplx)>& f, cplx w, double h) {
    const cplx i1(0.0, 1.0);
    auto d = [&](cplx u) {
        const double fx = (f(u + h) - f(u - h)) / (2 * h);
        const double fy = (f(u + i1 * h) - f(u - i1 * h)) / (2 * h);
        return 0.5 * (cplx(fx) - i1 * fy);
    };
    const cplx gx = (d(w + h) - d(w - h)) / (2 * h);
    const cplx gy = (d(w + i1 * h) - d(w - i1 * h)) / (2 * h);
    return (0.5 * (gx + i1 * gy)).real();
}

}  // namespace

SylvesterSolution sylvester_solve(const Mat& A, const Mat& B, const Mat& C) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || C.rows() != A.rows() || C.cols() != B.rows())
        throw Error(ErrorKind::InvalidParameter, "Sylvester dimensions mismatch");
    if (A.rows() > kOracleDimCap || B.rows() > kOracleDimCap)
        throw Error(ErrorKind::DimensionCap, "Sylvester oracle limited to 64 x 64 blocks");
    const Mat L = tau_columns(A, B);
    const Vec rhs = Eigen::Map<const Vec>(C.data(), C.size());
    auto sol = min_norm_solve(L, rhs);
    SylvesterSolution out;
    out.X = Eigen::Map<const Mat>(sol.x.data(), A.rows(), B.rows());
    out.null_basis = sol.null_basis;
    out.report = sol.report;
    const Mat recomputed = A * out.X - out.X * B - C;
    out.report.residual = recomputed.norm() / std::max(1.0, C.norm());
    return out;
}

IntertwinerSearch direct_intertwiner(const Mat& T, const Mat& Tt, Structure structure, int block_size,
                                     std::uint64_t seed, int draws) {
    if (T.rows() != Tt.rows() || T.rows() != T.cols()) throw Error(ErrorKind::InvalidParameter, "square operators of equal size required");
    if (block_size < 1 || T.rows() % block_size != 0) throw Error(ErrorKind::InvalidParameter, "block size must divide the dimension");
    if (block_size > kOracleDimCap) throw Error(ErrorKind::DimensionCap, "blocks limited to 64");
    const auto entries = allowed_entries(T.rows(), structure, block_size);
    if (static_cast<Eigen::Index>(entries.size()) > kUnknownCap)
        throw Error(ErrorKind::DimensionCap, "too many unknowns for the vectorized oracle");
    const Mat L = intertwining_columns(T, Tt, entries);
    auto sol = min_norm_solve(L, Vec::Zero(L.rows()));

    IntertwinerSearch out;
    out.report = sol.report;
    if (sol.null_basis.cols() == 0) throw Error(ErrorKind::NotFound, "only the zero intertwiner");
    for (Eigen::Index k = 0; k < sol.null_basis.cols(); ++k) out.basis.push_back(scatter(sol.null_basis.col(k), entries, T.rows()));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    out.best_condition = std::numeric_limits<double>::infinity();
    for (int d = 0; d < draws; ++d) {
        Mat X = Mat::Zero(T.rows(), T.cols());
        for (const auto& b : out.basis) X += cplx(gauss(rng), gauss(rng)) * b;
        const double c = condition_number(X);
        if (c < out.best_condition) {
            out.best_condition = c;
            out.best = X;
        }
    }
    out.found = std::isfinite(out.best_condition) && out.best_condition < 1e12;
    return out;
}

StructuredSolve solve_structured(const Mat& T, const Mat& Tt, const Mat& C, Structure structure, int block_size) {
    if (block_size < 1 || T.rows() % block_size != 0) throw Error(ErrorKind::InvalidParameter, "block size must divide the dimension");
    const auto entries = allowed_entries(T.rows(), structure, block_size);
    if (static_cast<Eigen::Index>(entries.size()) > kUnknownCap)
        throw Error(ErrorKind::DimensionCap, "too many unknowns for the vectorized oracle");
    const Mat L = intertwining_columns(T, Tt, entries);
    const Vec rhs = Eigen::Map<const Vec>(C.data(), C.size());
    auto sol = min_norm_solve(L, rhs);
    StructuredSolve out;
    out.X = scatter(sol.x, entries, T.rows());
    out.report = sol.report;
    out.report.residual = (out.X * T - Tt * out.X - C).norm() / std::max(1.0, C.norm());
    return out;
}

Eigen::MatrixXd fd_dbar_dlog(const Eigen::MatrixXd& values, double step) {
    const Eigen::Index ny = values.rows(), nx = values.cols();
    if (ny < 5 || nx < 5) throw Error(ErrorKind::OutOfDomain, "grid needs a margin of two steps");
    const cplx i1(0.0, 1.0);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(ny, nx);
    for (Eigen::Index y = 1; y + 1 < ny; ++y)
        for (Eigen::Index x = 1; x + 1 < nx; ++x) {
            const double fx = (values(y, x + 1) - values(y, x - 1)) / (2 * step);
            const double fy = (values(y + 1, x) - values(y - 1, x)) / (2 * step);
            d(y, x) = 0.5 * (cplx(fx) - i1 * fy);
        }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ny, nx);
    for (Eigen::Index y = 2; y + 2 < ny; ++y)
        for (Eigen::Index x = 2; x + 2 < nx; ++x) {
            const cplx gx = (d(y, x + 1) - d(y, x - 1)) / (2 * step);
            const cplx gy = (d(y + 1, x) - d(y - 1, x)) / (2 * step);
            out(y, x) = (0.5 * (gx + i1 * gy)).real();
        }
    return out;
}

double fd_dbar_dlog(const std::function<double(cplx)>& field, cplx w, double step) {
    return (4.0 * composed_ddbar(field, w, step) - composed_ddbar(field, w, 2.0 * step)) / 3.0;
}

}  // namespace cfbkit
