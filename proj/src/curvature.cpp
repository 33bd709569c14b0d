#include "cfbkit/curvature.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace cfbkit {

namespace {

const cplx I1(0.0, 1.0);

double laplacian5(const RealField& f, cplx w, double h) {
    return (f(w + h) + f(w - h) + f(w + I1 * h) + f(w - I1 * h) - 4.0 * f(w)) / (h * h);
}

template <typename F>
auto central(const F& f, cplx w, cplx dir, double h) {
    using R = std::decay_t<decltype(f(w))>;
    return R((f(w + dir * h) - f(w - dir * h)) / (2.0 * h));
}

template <typename F>
auto richardson_partial(const F& f, cplx w, cplx dir, double h) {
    using R = std::decay_t<decltype(f(w))>;
    return R((4.0 * central(f, w, dir, h) - central(f, w, dir, 2.0 * h)) / 3.0);
}

void check_grid(const std::vector<cplx>& grid, double limit) {
    for (const cplx& w : grid)
        if (std::abs(w) > limit) throw Error(ErrorKind::OutOfDomain, "grid point beyond the stencil margin");
}

double closed_form_curvature(double lambda, cplx w) {
    const double s = 1.0 - std::norm(w);
    return -lambda / (s * s);
}

cplx rank1_value(const DiagonalKernel& k, bool closed, cplx w) {
    if (closed) return closed_form_curvature(*k.lambda(), w);
    return -ddbar([&](cplx u) { return std::log(k.eval(u)); }, w);
}

cplx rank1_covariant(const DiagonalKernel& k, bool closed, const std::vector<Direction>& hist, std::size_t depth, cplx w) {
    if (depth == 0) return rank1_value(k, closed, w);
    const auto sub = [&](cplx u) { return rank1_covariant(k, closed, hist, depth - 1, u); };
    return wirtinger(std::function<cplx(cplx)>(sub), w, hist[depth - 1]);
}

Mat connection(const Frame& frame, cplx w, double h) {
    const Mat hw = gram(frame, w);
    const Mat dh = wirtinger([&](cplx u) { return gram(frame, u); }, w, Direction::W, h);
    return hw.partialPivLu().solve(dh);
}

Mat rank_n_value(const Frame& frame, cplx w, double h) {
    return -wirtinger([&](cplx u) { return connection(frame, u, h); }, w, Direction::WBar, h);
}

Mat rank_n_covariant(const Frame& frame, const std::vector<Direction>& hist, std::size_t depth, cplx w, double h) {
    if (depth == 0) return rank_n_value(frame, w, h);
    const auto sub = [&](cplx u) { return rank_n_covariant(frame, hist, depth - 1, u, h); };
    Mat d = wirtinger(MatrixField(sub), w, hist[depth - 1]);
    if (hist[depth - 1] == Direction::W) {
        const Mat G = connection(frame, w, h);
        const Mat K = sub(w);
        d += G * K - K * G;
    }
    return d;
}

double tail_fraction(const DiagonalKernel& k, cplx w, int N) {
    const double full = k.eval(w);
    const double part = section(k, w, N).coords.squaredNorm();
    return std::max(0.0, (full - part) / full);
}

}  // namespace

double ddbar(const RealField& f, cplx w, double h) {
    return (4.0 * laplacian5(f, w, h) - laplacian5(f, w, 2.0 * h)) / 3.0 / 4.0;
}

cplx wirtinger(const std::function<cplx(cplx)>& f, cplx w, Direction dir, double h) {
    const cplx fx = richardson_partial(f, w, cplx(1.0), h);
    const cplx fy = richardson_partial(f, w, I1, h);
    return dir == Direction::W ? 0.5 * (fx - I1 * fy) : 0.5 * (fx + I1 * fy);
}

Mat wirtinger(const MatrixField& f, cplx w, Direction dir, double h) {
    const Mat fx = richardson_partial(f, w, cplx(1.0), h);
    const Mat fy = richardson_partial(f, w, I1, h);
    return dir == Direction::W ? Mat(0.5 * (fx - I1 * fy)) : Mat(0.5 * (fx + I1 * fy));
}

int CurvatureField::order_w() const {
    int c = 0;
    for (auto d : history) c += d == Direction::W;
    return c;
}

int CurvatureField::order_wbar() const { return static_cast<int>(history.size()) - order_w(); }

CurvatureField curvature_rank1(const DiagonalKernel& k, const std::vector<cplx>& grid, CurvatureMethod method) {
    check_grid(grid, 0.95);
    bool closed = false;
    if (method == CurvatureMethod::ClosedForm) {
        if (!k.lambda()) throw Error(ErrorKind::Unsupported, "closed form needs a lambda-family kernel");
        closed = true;
    } else if (method == CurvatureMethod::Auto) {
        closed = k.lambda().has_value();
    }
    CurvatureField f;
    f.grid = grid;
    f.source = closed ? FieldSource::ClosedForm : FieldSource::FiniteDifference;
    f.step = closed ? 0.0 : kStencilStep;
    f.values.reserve(grid.size());
    for (const cplx& w : grid) f.values.push_back(rank1_value(k, closed, w));
    return f;
}

CurvatureField curvature_from_metric(const RealField& metric, const std::vector<cplx>& grid) {
    check_grid(grid, 0.95);
    CurvatureField f;
    f.grid = grid;
    f.source = FieldSource::FiniteDifference;
    f.step = kStencilStep;
    for (const cplx& w : grid) f.values.push_back(-ddbar([&](cplx u) { return std::log(metric(u)); }, w));
    return f;
}

CurvatureField covariant_derivative(const CurvatureField& field, const DiagonalKernel& k, Direction dir, int max_order) {
    if (static_cast<int>(field.history.size()) + 1 > max_order)
        throw Error(ErrorKind::InvalidParameter, "covariant derivative order above the configured cap");
    check_grid(field.grid, 0.95 - 4.0 * kDerivativeStep * (field.history.size() + 1));
    const bool closed = field.source == FieldSource::ClosedForm;
    if (closed && !k.lambda()) throw Error(ErrorKind::Unsupported, "closed-form field needs a lambda-family kernel");
    CurvatureField out = field;
    out.history.push_back(dir);
    out.step = kDerivativeStep;
    out.note = "rank 1: commutator term vanishes";
    for (std::size_t p = 0; p < out.grid.size(); ++p)
        out.values[p] = rank1_covariant(k, closed, out.history, out.history.size(), out.grid[p]);
    return out;
}

double sff_ratio(const Mat& block, const DiagonalKernel& k_next, cplx w) {
    const auto t = section(k_next, w, static_cast<int>(block.cols())).coords;
    return (block * t).squaredNorm() / t.squaredNorm();
}

SecondFundamentalForm sff_classical(const DiagonalKernel& k1, const Mat& block, const DiagonalKernel& k2,
                                    const std::vector<cplx>& grid) {
    const auto curv = curvature_rank1(k1, grid);
    SecondFundamentalForm out;
    out.grid = grid;
    out.variant = SffVariant::Classical;
    const int N = static_cast<int>(block.cols());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double K = curv.values[p].real();
        const double denom = sff_ratio(block, k2, grid[p]) - K;
        if (!(denom > 0.0)) throw Error(ErrorKind::Precondition, "non-positive denominator in the classical form");
        out.values.push_back(K / std::sqrt(denom));
        out.truncation_bound = std::max(out.truncation_bound, tail_fraction(k2, grid[p], N));
    }
    return out;
}

SecondFundamentalForm sff_generalized(const CfbOperator& T, int i, const std::vector<cplx>& grid) {
    if (i < 0 || i + 1 >= T.n()) throw Error(ErrorKind::IndexRange, "superdiagonal index out of range");
    check_grid(grid, 0.95);
    const Mat B = T.block(i, i + 1);
    SecondFundamentalForm out;
    out.grid = grid;
    out.variant = SffVariant::Generalized;
    for (const cplx& w : grid) {
        out.values.push_back(sff_ratio(B, T.kernels()[i + 1], w));
        out.truncation_bound = std::max(out.truncation_bound, tail_fraction(T.kernels()[i + 1], w, T.N()));
    }
    return out;
}

Mat gram(const Frame& frame, cplx w) {
    const Mat G = frame(w);
    return G.adjoint() * G;
}

MatrixCurvatureField curvature_rank_n(const Frame& frame, const std::vector<cplx>& grid, double h) {
    MatrixCurvatureField out;
    out.grid = grid;
    for (const cplx& w : grid) {
        require_in_disk(w);
        if (condition_number(gram(frame, w)) >= 1e8) throw Error(ErrorKind::SingularFrame, "frame Gram matrix is singular");
        out.values.push_back(rank_n_value(frame, w, h));
    }
    return out;
}

MatrixCurvatureField covariant_derivative(const MatrixCurvatureField& field, const Frame& frame, Direction dir,
                                          int max_order, double h) {
    if (static_cast<int>(field.history.size()) + 1 > max_order)
        throw Error(ErrorKind::InvalidParameter, "covariant derivative order above the configured cap");
    MatrixCurvatureField out = field;
    out.history.push_back(dir);
    for (std::size_t p = 0; p < out.grid.size(); ++p)
        out.values[p] = rank_n_covariant(frame, out.history, out.history.size(), out.grid[p], h);
    return out;
}

std::string to_csv(const CurvatureField& f) {
    std::ostringstream os;
    os.precision(17);
    os << "re_w,im_w,re_value,im_value\n";
    for (std::size_t p = 0; p < f.grid.size(); ++p)
        os << f.grid[p].real() << "," << f.grid[p].imag() << "," << f.values[p].real() << "," << f.values[p].imag() << "\n";
    return os.str();
}

std::string to_csv(const SecondFundamentalForm& f) {
    std::ostringstream os;
    os.precision(17);
    os << "re_w,im_w,value\n";
    for (std::size_t p = 0; p < f.grid.size(); ++p)
        os << f.grid[p].real() << "," << f.grid[p].imag() << "," << f.values[p] << "\n";
    return os.str();
}

}  // namespace cfbkit
