#include "cfbkit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace cfbkit {

namespace {

bool same_kernels(const CfbOperator& T, const CfbOperator& Tt) {
    for (int i = 0; i < T.n(); ++i) {
        const auto a = T.kernels()[i].coeffs_upto(T.N());
        const auto b = Tt.kernels()[i].coeffs_upto(T.N());
        for (int m = 0; m < T.N(); ++m)
            if (std::abs(a[m] - b[m]) > 1e-12 * std::abs(a[m])) return false;
    }
    return true;
}

void require_compatible(const CfbOperator& T, const CfbOperator& Tt) {
    if (T.n() != Tt.n() || T.N() != Tt.N())
        throw Error(ErrorKind::InvalidParameter, "operators differ in block count or truncation");
}

Mat block_diagonal(const std::vector<Mat>& blocks) {
    const Eigen::Index N = blocks.front().rows();
    const Eigen::Index n = static_cast<Eigen::Index>(blocks.size());
    Mat X = Mat::Zero(n * N, n * N);
    for (Eigen::Index i = 0; i < n; ++i) X.block(i * N, i * N, N, N) = blocks[i];
    return X;
}

Mat psd_sqrt(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

double norm_ratio(const Mat& Phi, const Vec& t) { return (Phi * t).squaredNorm() / t.squaredNorm(); }

std::string describe(cplx z) {
    std::ostringstream os;
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
    return os.str();
}

std::vector<double> curvature_values(const DiagonalKernel& k, const std::vector<cplx>& grid) {
    const auto f = curvature_rank1(k, grid);
    std::vector<double> out;
    for (const cplx& v : f.values) out.push_back(v.real());
    return out;
}

}  // namespace

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::Similar: return "Similar";
        case SimStatus::NotSimilar: return "NotSimilar";
        case SimStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(HomStatus s) {
    switch (s) {
        case HomStatus::WeaklyHomogeneous: return "WeaklyHomogeneous";
        case HomStatus::NotWeaklyHomogeneous: return "NotWeaklyHomogeneous";
        case HomStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

double intertwining_residual(const Mat& X, const CfbOperator& T, const CfbOperator& Tt) {
    const Mat R = X * T.assembled() - Tt.assembled() * X;
    const double scale = op_norm(X) * std::max(1.0, op_norm(T.assembled()));
    return interior_block_norm(R, T.n(), T.N(), T.edge().interior_dim) / scale;
}

SimilarityVerdict decide_multiplication_family(const CfbOperator& T, const CfbOperator& Tt) {
    require_compatible(T, Tt);
    if (!same_kernels(T, Tt)) throw Error(ErrorKind::Precondition, "kernels differ blockwise");
    for (int i = 0; i + 1 < T.n(); ++i)
        if (T.superdiag()[i].kind() != SymbolKind::Polynomial || Tt.superdiag()[i].kind() != SymbolKind::Polynomial)
            throw Error(ErrorKind::Unsupported, "superdiagonal symbols must be polynomials");

    SimilarityVerdict v;
    bool inconclusive = false;
    for (int i = 0; i + 1 < T.n(); ++i) {
        const auto d = ratio_bounded_both_ways(T.superdiag()[i], Tt.superdiag()[i]);
        if (d.status == RatioBound::Unbounded) {
            v.status = SimStatus::NotSimilar;
            v.obstruction = d.obstruction;
            return v;
        }
        if (d.status == RatioBound::Inconclusive) {
            inconclusive = true;
            v.obstruction = d.obstruction;
        }
    }
    if (inconclusive) return v;

    const int n = T.n(), N = T.N();
    std::vector<Mat> blocks(n);
    AnalyticSymbol num = AnalyticSymbol::constant(1.0), den = AnalyticSymbol::constant(1.0);
    blocks[n - 1] = Mat::Identity(N, N);
    for (int i = n - 2; i >= 0; --i) {
        num = num * Tt.superdiag()[i];
        den = den * T.superdiag()[i];
        const auto psi = quotient_series(num, den, static_cast<std::size_t>(N));
        blocks[i] = symbol_operator(psi, T.kernels()[i], T.kernels()[i], N);
    }
    v.witness = block_diagonal(blocks);
    v.condition = condition_number(v.witness);
    v.residual = intertwining_residual(v.witness, T, Tt);
    if (v.residual <= kWitnessResidualTol && v.condition <= kWitnessConditionCap) {
        v.status = SimStatus::Similar;
    } else {
        std::ostringstream os;
        os << "witness rejected: residual " << v.residual << ", condition " << v.condition;
        v.obstruction = os.str();
    }
    return v;
}

RecursiveIntertwiner recursive_intertwiner(const CfbOperator& T, const CfbOperator& Tt) {
    require_compatible(T, Tt);
    const int n = T.n(), N = T.N();
    for (int i = 0; i < n; ++i)
        for (int j = i; j <= std::min(i + 1, n - 1); ++j) {
            const Mat a = T.block(i, j), b = Tt.block(i, j);
            if ((a - b).norm() > 1e-12 * (1.0 + a.norm()))
                throw Error(ErrorKind::Precondition, "diagonal and superdiagonal blocks must agree");
        }

    const Mat& A = T.assembled();
    const Mat& At = Tt.assembled();
    const Mat D = At - A;
    const Mat I = Mat::Identity(N, N);
    RecursiveIntertwiner out;
    out.K = Mat::Zero(n * N, n * N);
    auto sub = [N](Mat& m, int i, int j) { return m.block(i * N, j * N, N, N); };

    for (int g = 2; g < n; ++g) {
        double stage = 0.0;
        for (int i = n - 1 - g; i >= 0; --i) {
            const int l = i + g;
            const Mat E = (out.K * A - At * out.K).block(i * N, l * N, N, N);
            const Mat rhs = D.block(i * N, l * N, N, N) - E;
            const Mat Tsup = T.block(l - 1, l);
            const Mat Tdiag = T.block(i, i), Tlast = T.block(l - 1, l - 1);
            Mat L(2 * N * N, N * N);
            L.topRows(N * N) = kron(Tsup.transpose(), I);
            L.bottomRows(N * N) = kron(I, Tdiag) - kron(Tlast.transpose(), I);
            Vec b = Vec::Zero(2 * N * N);
            b.head(N * N) = vectorize(rhs);
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(L);
            const Vec x = cod.solve(b);
            stage = std::max(stage, (L * x - b).norm() / std::max(1.0, b.norm()));
            sub(out.K, i, l - 1) = unvectorize(x, N, N);
        }
        out.stage_residuals.push_back(stage);
    }
    const Mat X = Mat::Identity(n * N, n * N) + out.K;
    out.residual = intertwining_residual(X, T, Tt);
    out.status = out.residual <= kWitnessResidualTol && condition_number(X) <= kWitnessConditionCap
                     ? SimStatus::Similar
                     : SimStatus::Inconclusive;
    return out;
}

DiagonalReduction diagonal_reduction(const CfbOperator& T, const CfbOperator& Tt, const Mat& X) {
    require_compatible(T, Tt);
    const int n = T.n(), N = T.N();
    if (X.rows() != n * N || X.cols() != n * N) throw Error(ErrorKind::InvalidParameter, "witness has the wrong size");
    double lower = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) lower = std::max(lower, block(X, i, j, N).norm());
    if (lower > 1e-10 * std::max(1.0, X.norm()))
        throw Error(ErrorKind::StructureViolation, "intertwiner is not block upper triangular");
    if (intertwining_residual(X, T, Tt) > kWitnessResidualTol)
        throw Error(ErrorKind::Precondition, "X does not intertwine T and T~ on the interior");

    const int m = T.edge().interior_dim;
    DiagonalReduction out;
    for (int i = 0; i < n; ++i) {
        const Mat Xi = block(X, i, i, N);
        out.blocks.push_back(Xi);
        out.diagonal_residuals.push_back((Xi * T.block(i, i) - Tt.block(i, i) * Xi).topLeftCorner(m, m).norm());
        if (i + 1 < n) {
            const Mat r = Xi * T.block(i, i + 1) - Tt.block(i, i + 1) * block(X, i + 1, i + 1, N);
            out.superdiagonal_residuals.push_back(r.topLeftCorner(m, m).norm());
        }
    }
    return out;
}

CurvatureMatchCertificate curvature_similarity_check(const DiagonalKernel& k1, const DiagonalKernel& k2,
                                                     const RealField& psi, const std::vector<cplx>& grid) {
    CurvatureMatchCertificate c;
    c.grid = grid;
    const auto K1 = curvature_values(k1, grid);
    const auto K2 = curvature_values(k2, grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double v = psi(grid[p]);
        if (!(v > 0.0)) throw Error(ErrorKind::InvalidWitness, "Psi is not positive at " + describe(grid[p]));
        c.psi.push_back(v);
        const double r = K1[p] - K2[p] - ddbar([&](cplx u) { return std::log(psi(u)); }, grid[p]);
        c.residual.push_back(r);
        c.max_residual = std::max(c.max_residual, std::abs(r));
    }
    c.status = c.max_residual <= kCurvatureMatchTol ? SimStatus::Similar : SimStatus::NotSimilar;
    return c;
}

CurvatureMatchCertificate curvature_similarity_check(const DiagonalKernel& k1, const DiagonalKernel& k2, const Mat& Phi,
                                                     const std::vector<cplx>& grid) {
    if (Phi.rows() != Phi.cols()) throw Error(ErrorKind::InvalidParameter, "witness must be square");
    const int N = static_cast<int>(Phi.rows());
    const RealField psi = [&](cplx u) { return norm_ratio(Phi, section(k1, u, N).coords) + 1.0; };
    auto c = curvature_similarity_check(k1, k2, psi, grid);
    c.witness_norm = op_norm(Phi);

    const Mat Y = psd_sqrt(Mat::Identity(N, N) + Phi.adjoint() * Phi);
    const auto conj = curvature_from_metric([&](cplx u) { return (Y * section(k1, u, N).coords).squaredNorm(); }, grid);
    const auto K2 = curvature_values(k2, grid);
    c.conjugate_check = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p)
        c.conjugate_check = std::max(c.conjugate_check, std::abs(conj.values[p].real() - K2[p]));
    if (c.conjugate_check > kCurvatureMatchTol) c.status = SimStatus::NotSimilar;
    return c;
}

BundleWitnesses witnesses_from_intertwiners(const std::vector<Mat>& Y) {
    if (Y.empty()) throw Error(ErrorKind::InvalidParameter, "no intertwiner blocks");
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& y : Y) {
        Eigen::JacobiSVD<Mat> svd(y);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 1e-12 * s(0)) throw Error(ErrorKind::Precondition, "intertwiner block is singular");
        smin = std::min(smin, s(s.size() - 1));
    }
    BundleWitnesses out;
    out.scale = 1.0 / smin;
    for (const auto& y : Y) {
        const Mat G = out.scale * out.scale * (y.adjoint() * y) - Mat::Identity(y.cols(), y.cols());
        out.Phi.push_back(psd_sqrt(0.5 * (G + G.adjoint())));
    }
    return out;
}

UnitaryPlusCompact unitary_plus_compact(const Mat& Y) {
    if (Y.rows() != Y.cols()) throw Error(ErrorKind::InvalidParameter, "Y must be square");
    Eigen::JacobiSVD<Mat> svd(Y);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 1e-12 * std::max(1.0, s(0)))
        throw Error(ErrorKind::Precondition, "Y is singular");

    const Eigen::Index N = Y.rows();
    const Mat YY = Y.adjoint() * Y;
    const Mat G = YY - Mat::Identity(N, N);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()));
    const double eps = 1e-6;
    const double gmin = es.eigenvalues().minCoeff();
    const double alpha = std::clamp(std::max(eps, 1.0 - gmin), eps, 1.0 - eps);
    if (!(alpha + gmin > 0.0)) throw Error(ErrorKind::NotDecomposable, "no admissible alpha in (0, 1)");

    UnitaryPlusCompact out;
    out.alpha = alpha;
    out.g_eigenvalues = es.eigenvalues();
    const Eigen::VectorXd root = (es.eigenvalues().array() + alpha).sqrt().matrix();
    out.k1_spectrum = (root.array() - std::sqrt(alpha)).matrix();
    out.X = es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const Mat check = out.X.adjoint() * out.X + (1.0 - alpha) * Mat::Identity(N, N) - YY;
    out.residual = check.norm() / std::max(1.0, YY.norm());
    if (out.residual > 1e-10) throw Error(ErrorKind::NotDecomposable, "reconstruction of Y*Y failed");
    return out;
}

BundleWitnessReport bundle_witness_check(const CfbOperator& T, const CfbOperator& Tt, const std::vector<Mat>& Phi,
                                const std::vector<cplx>& grid) {
    require_compatible(T, Tt);
    const int n = T.n(), N = T.N();
    BundleWitnessReport r;
    if (static_cast<int>(Phi.size()) != n) {
        r.note = "missing witness";
        return r;
    }
    for (const auto& p : Phi)
        if (p.rows() != N || p.cols() != N) throw Error(ErrorKind::InvalidParameter, "witness blocks must be N x N");

    auto phi = [&](int i, cplx u) { return norm_ratio(Phi[i], section(T.kernels()[i], u, N).coords) + 1.0; };
    bool ok = true;
    for (int i = 0; i < n; ++i) {
        const auto Ka = curvature_values(T.kernels()[i], grid);
        const auto Kb = curvature_values(Tt.kernels()[i], grid);
        double worst = 0.0;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const double d = ddbar([&](cplx u) { return std::log(phi(i, u)); }, grid[p]);
            worst = std::max(worst, std::abs(Ka[p] - Kb[p] - d));
        }
        r.curvature_residuals.push_back(worst);
        ok = ok && worst <= kCurvatureMatchTol;
    }
    for (int i = 0; i + 1 < n; ++i) {
        const Mat B = T.block(i, i + 1), Bt = Tt.block(i, i + 1);
        double worst = 0.0;
        for (const cplx& w : grid) {
            const double theta = sff_ratio(B, T.kernels()[i + 1], w);
            const double theta_t = sff_ratio(Bt, Tt.kernels()[i + 1], w);
            const double lhs = phi(i, w) / phi(i + 1, w) * theta;
            worst = std::max(worst, std::abs(lhs - theta_t) / std::max(1.0, std::abs(theta_t)));
        }
        r.sff_residuals.push_back(worst);
        ok = ok && worst <= kBundleSffTol;
    }

    std::vector<Mat> Y;
    for (const auto& p : Phi) Y.push_back(psd_sqrt(Mat::Identity(N, N) + p.adjoint() * p));
    r.chain_residual = intertwining_residual(block_diagonal(Y), T, Tt);
    r.status = ok ? SimStatus::Similar : SimStatus::Inconclusive;
    if (!ok) r.note = "supplied witnesses fail the conditions";
    return r;
}

MobiusIntertwiner mobius_intertwiner(const CfbOperator& T, const MobiusMap& m) {
    const int n = T.n(), N = T.N();
    for (const auto& s : T.superdiag())
        if (s.kind() != SymbolKind::Polynomial) throw Error(ErrorKind::Unsupported, "superdiagonal symbols must be polynomials");
    const std::size_t len = static_cast<std::size_t>(N);
    const auto sigma = m.taylor(len + 1);
    const auto dsigma = series::derivative(sigma);

    std::vector<Mat> blocks(n);
    std::vector<cplx> rho(len, 0.0);
    rho[0] = 1.0;
    for (int i = n - 1; i >= 0; --i) {
        if (i < n - 1) {
            const auto& psi = T.superdiag()[i].coeffs();
            const auto num = series::compose(psi, sigma, len);
            const auto den = series::mul(series::padded(psi, len), dsigma, len);
            rho = series::mul(rho, series::div(num, den, len), len);
        }
        const auto rs = AnalyticSymbol::series(rho, std::abs(rho.back()), 1.0);
        const auto& k = T.kernels()[i];
        blocks[i] = multiplication_operator(rs, k, k, N) * composition_operator(m, k, N);
    }

    MobiusIntertwiner out;
    out.X = block_diagonal(blocks);
    const Mat Ts = T.assembled().adjoint();
    const Mat R = mobius_of_operator(m, Ts) * out.X - out.X * Ts;
    const int q = std::min(T.edge().interior_dim, N - 1);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, block(R, i, i, N).topLeftCorner(q, q).norm());
        if (i + 1 < n) worst = std::max(worst, block(R, i + 1, i, N).topLeftCorner(q, q).norm());
    }
    out.residual = worst / (op_norm(out.X) * std::max(1.0, op_norm(Ts)));
    out.condition = condition_number(out.X);
    return out;
}

HomogeneityVerdict weak_homogeneity(const CfbOperator& T, const std::vector<MobiusMap>& samples) {
    for (int i = 0; i < T.n(); ++i) {
        const auto l = T.kernels()[i].lambda();
        if (!l || *l < 1.0) throw Error(ErrorKind::OutOfScopeParameters, "kernels must be lambda-family with lambda >= 1");
        if (i + 1 < T.n()) {
            const auto l2 = T.kernels()[i + 1].lambda();
            if (!l2 || *l2 < *l || *l2 >= *l + 2.0)
                throw Error(ErrorKind::OutOfScopeParameters, "lambda chain must satisfy l_i <= l_{i+1} < l_i + 2");
        }
    }
    for (const auto& s : T.superdiag())
        if (s.kind() != SymbolKind::Polynomial) throw Error(ErrorKind::Unsupported, "superdiagonal symbols must be polynomials");

    HomogeneityVerdict v;
    bool boundary = false;
    for (int i = 0; i + 1 < T.n(); ++i) {
        const auto& s = T.superdiag()[i];
        if (s.is_zero()) {
            v.status = HomStatus::NotWeaklyHomogeneous;
            v.obstruction = "superdiagonal symbol " + std::to_string(i) + " vanishes identically";
            return v;
        }
        for (const auto& z : zeros_in_disk(s)) {
            if (z.location == RootLocation::Interior) {
                v.status = HomStatus::NotWeaklyHomogeneous;
                v.obstruction = "zero " + describe(z.root) + " inside the disk";
                return v;
            }
            if (z.location == RootLocation::Boundary) {
                boundary = true;
                v.obstruction = "zero " + describe(z.root) + " on the unit circle";
            }
        }
    }
    if (boundary) return v;

    bool ok = true;
    for (const auto& m : samples) {
        v.samples.push_back(mobius_intertwiner(T, m));
        const auto& s = v.samples.back();
        ok = ok && s.residual <= kMobiusResidualTol && std::isfinite(s.condition);
    }
    v.status = ok ? HomStatus::WeaklyHomogeneous : HomStatus::Inconclusive;
    if (!ok) v.obstruction = "sample intertwiner residual above tolerance";
    return v;
}

}  // namespace cfbkit
