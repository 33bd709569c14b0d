#include "cfbkit/property_h.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace cfbkit {

namespace {

double fit_slope(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(pts.size());
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<std::size_t> dyadic_samples(std::size_t n_max) {
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= n_max; n *= 2) ns.push_back(n);
    if (ns.size() < 4) throw Error(ErrorKind::TruncationInsufficient, "need n_max >= 8 for a dyadic slope fit");
    // the asymptotic regime: keep the upper half of the dyadic range
    return {ns.begin() + ns.size() / 2, ns.end()};
}

HStatus classify_slope(double slope, bool positive_holds) {
    if (slope > 0.05) return positive_holds ? HStatus::Holds : HStatus::CriterionNotMet;
    if (slope < -0.05) return positive_holds ? HStatus::CriterionNotMet : HStatus::Holds;
    return HStatus::Inconclusive;
}

}  // namespace

const char* to_string(HStatus s) {
    switch (s) {
        case HStatus::Holds: return "Holds";
        case HStatus::CriterionNotMet: return "CriterionNotMet";
        case HStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(HCriterion c) {
    switch (c) {
        case HCriterion::KernelRatio: return "KernelRatio";
        case HCriterion::NormLimit: return "NormLimit";
        case HCriterion::WeightProduct: return "WeightProduct";
        case HCriterion::LambdaGap: return "LambdaGap";
        case HCriterion::BruteForce: return "BruteForce";
    }
    return "?";
}

PropertyHVerdict check_lambda_gap(double lambda1, double lambda2) {
    if (!(lambda1 >= 1.0 && lambda2 >= 1.0)) throw Error(ErrorKind::Precondition, "lambda gap criterion needs lambda >= 1");
    PropertyHVerdict v;
    v.criterion = HCriterion::LambdaGap;
    v.trace = {{lambda1, lambda2}};
    v.slope = lambda2 - lambda1;
    v.status = (lambda2 - lambda1 < 2.0) ? HStatus::Holds : HStatus::CriterionNotMet;
    v.note = "gap lambda2 - lambda1 compared against 2";
    return v;
}

PropertyHVerdict check_kernel_ratio(const DiagonalKernel& k1, const DiagonalKernel& k2, const std::vector<double>& radii) {
    const auto prof = kernel_ratio_profile(k1, k2, radii);
    PropertyHVerdict v;
    v.criterion = HCriterion::KernelRatio;
    v.trace = prof.samples;
    v.slope = prof.slope;
    v.status = prof.tag == GrowthTag::Diverges ? HStatus::Holds : HStatus::CriterionNotMet;
    v.note = std::string("kernel ratio ") + to_string(prof.tag);
    return v;
}

PropertyHVerdict check_weight_product(const WeightSequence& a, const WeightSequence& b, std::size_t n_max) {
    if (n_max > a.weights.size() || n_max > b.weights.size())
        throw Error(ErrorKind::TruncationInsufficient, "weight sequences shorter than n_max");
    if (!(a.inf > 0.0 && b.inf > 0.0)) throw Error(ErrorKind::Precondition, "weights must be bounded below");
    PropertyHVerdict v;
    v.criterion = HCriterion::WeightProduct;
    const auto ns = dyadic_samples(n_max);
    std::vector<std::pair<double, double>> pts;
    long double logp = 0.0L;
    std::size_t k = 0;
    for (std::size_t n : ns) {
        for (; k < n; ++k) logp += std::log(static_cast<long double>(b.weights[k])) - std::log(static_cast<long double>(a.weights[k]));
        const double log_s = std::log(static_cast<double>(n)) + static_cast<double>(logp);
        pts.emplace_back(std::log(static_cast<double>(n)), log_s);
        v.trace.emplace_back(static_cast<double>(n), std::exp(log_s));
    }
    v.slope = fit_slope(pts);
    v.status = classify_slope(v.slope, true);
    v.note = "log-slope of n * prod b / prod a";
    return v;
}

PropertyHVerdict check_norm_limit(const WeightSequence& t1, const WeightSequence& t2, std::size_t n_max) {
    if (!(t2.inf > 0.0)) throw Error(ErrorKind::Precondition, "t2 weights must be bounded below");
    if (n_max + 1 > t1.weights.size() || n_max + 1 > t2.weights.size())
        throw Error(ErrorKind::TruncationInsufficient, "weight sequences shorter than n_max + 1");
    PropertyHVerdict v;
    v.criterion = HCriterion::NormLimit;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n : dyadic_samples(n_max)) {
        const double q = operator_norm_power(t1, n, false) * operator_norm_power(t2, n, true) / static_cast<double>(n);
        pts.emplace_back(std::log(static_cast<double>(n)), std::log(q));
        v.trace.emplace_back(static_cast<double>(n), q);
    }
    v.slope = fit_slope(pts);
    v.status = classify_slope(v.slope, false);
    v.note = "log-slope of ||T1^n|| ||S2^n|| / n";
    return v;
}

Vec vectorize(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols) { return Eigen::Map<const Mat>(v.data(), rows, cols); }

SylvesterSystem SylvesterSystem::build(const Mat& A, const Mat& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols()) throw Error(ErrorKind::InvalidParameter, "A and B must be square");
    const Eigen::Index n = A.rows(), m = B.rows();
    SylvesterSystem s{A, B, Mat::Zero(n * m, n * m)};
    for (Eigen::Index j = 0; j < m; ++j) s.lhs.block(j * n, j * n, n, n) += A;
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index l = 0; l < m; ++l)
            if (B(l, j) != cplx(0.0)) s.lhs.block(j * n, l * n, n, n).diagonal().array() -= B(l, j);
    return s;
}

Mat SylvesterSystem::apply(const Mat& X) const { return unvectorize(lhs * vectorize(X), A.rows(), B.rows()); }

BruteForceResult brute_force_tau(const Mat& A, const Mat& B) {
    if (A.rows() > kBruteForceDimCap || B.rows() > kBruteForceDimCap)
        throw Error(ErrorKind::DimensionCap, "brute force limited to 64 x 64 blocks");
    const auto sys = SylvesterSystem::build(A, B);
    const Eigen::Index dim = sys.lhs.rows();
    Eigen::BDCSVD<Mat> svd(sys.lhs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * (s.size() ? s(0) : 0.0);
    int r = 0;
    while (r < s.size() && s(r) > tol) ++r;

    BruteForceResult out;
    out.rank = r;
    out.kernel_basis = svd.matrixV().rightCols(dim - r);
    out.range_basis = svd.matrixU().leftCols(r);
    out.smallest_nonzero_singular = r > 0 ? s(r - 1) : 0.0;

    const Mat range_perp = svd.matrixU().rightCols(dim - r);
    out.min_principal_angle = M_PI / 2;
    out.intersection_dim = 0;
    if (out.kernel_basis.cols() > 0 && r > 0) {
        // sines of the principal angles between ker and ran
        Eigen::JacobiSVD<Mat> cross(range_perp.adjoint() * out.kernel_basis);
        const auto& sines = cross.singularValues();
        const Eigen::Index k = out.kernel_basis.cols();
        for (Eigen::Index i = 0; i < k; ++i) {
            const double sn = i < sines.size() ? sines(i) : 0.0;
            out.min_principal_angle = std::min(out.min_principal_angle, std::asin(std::min(1.0, sn)));
            if (sn <= 1e-6) ++out.intersection_dim;
        }
    }
    auto& v = out.verdict;
    v.criterion = HCriterion::BruteForce;
    v.trace = {{static_cast<double>(out.kernel_basis.cols()), static_cast<double>(r)},
               {static_cast<double>(out.intersection_dim), out.min_principal_angle}};
    v.status = out.intersection_dim == 0 ? HStatus::Holds : HStatus::CriterionNotMet;
    std::ostringstream os;
    os << "truncation oracle: dim ker=" << out.kernel_basis.cols() << " rank=" << r
       << " dim(ker cap ran)=" << out.intersection_dim;
    v.note = os.str();
    return out;
}

IntertwinerStructure check_intertwiner_structure(const Mat& X, const WeightSequence& a, const WeightSequence& b) {
    const Eigen::Index N = X.rows();
    if (static_cast<Eigen::Index>(a.weights.size()) < N - 1 || static_cast<Eigen::Index>(b.weights.size()) < N - 1)
        throw Error(ErrorKind::TruncationInsufficient, "weights shorter than N - 1");
    const double scale = std::max(X.cwiseAbs().maxCoeff(), 1e-300);
    IntertwinerStructure c;
    for (Eigen::Index i = 1; i < N; ++i)
        for (Eigen::Index j = 0; j < i; ++j) c.below_diagonal = std::max(c.below_diagonal, std::abs(X(i, j)) / scale);
    for (Eigen::Index s = 0; s < N; ++s) {
        long double f = 1.0L;
        for (Eigen::Index i = 0; i + s < N; ++i) {
            if (i > 0) f *= static_cast<long double>(b.weights[i - 1 + s]) / a.weights[i - 1];
            const cplx predicted = static_cast<double>(f) * X(0, s);
            c.entry_law = std::max(c.entry_law, std::abs(X(i, i + s) - predicted) / scale);
        }
    }
    return c;
}

}  // namespace cfbkit
