#include "cfbkit/kernels.hpp"

#include <cmath>
#include <sstream>

namespace cfbkit {

namespace {

std::vector<double> lambda_coeffs(double lambda, std::size_t count) {
    std::vector<double> out(count);
    long double a = 1.0L;
    for (std::size_t n = 0; n < count; ++n) {
        out[n] = static_cast<double>(a);
        a *= (static_cast<long double>(lambda) + n) / static_cast<long double>(n + 1);
    }
    return out;
}

}  // namespace

DiagonalKernel DiagonalKernel::from_coeffs(std::vector<double> coeffs, std::string label) {
    if (coeffs.empty()) throw Error(ErrorKind::InvalidParameter, "kernel needs at least one coefficient");
    for (double c : coeffs)
        if (!(c > 0.0) || !std::isfinite(c))
            throw Error(ErrorKind::InvalidParameter, "kernel coefficients must be positive and finite");
    const double a0 = coeffs[0];
    for (double& c : coeffs) c /= a0;
    DiagonalKernel k;
    k.coeffs_ = std::move(coeffs);
    k.label_ = label.empty() ? "coeffs" : std::move(label);
    return k;
}

DiagonalKernel DiagonalKernel::lambda_family(double lambda, std::size_t M) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidParameter, "lambda must be positive");
    if (M < 2) throw Error(ErrorKind::InvalidParameter, "need M >= 2 coefficients");
    DiagonalKernel k;
    k.coeffs_ = lambda_coeffs(lambda, M);
    k.lambda_ = lambda;
    std::ostringstream os;
    os << "lambda=" << lambda;
    k.label_ = os.str();
    return k;
}

double DiagonalKernel::coeff(std::size_t n) const {
    if (n < coeffs_.size()) return coeffs_[n];
    if (!lambda_) throw Error(ErrorKind::TruncationInsufficient, "coefficient index beyond stored range");
    return lambda_coeffs(*lambda_, n + 1).back();
}

std::vector<double> DiagonalKernel::coeffs_upto(std::size_t count) const {
    if (count <= coeffs_.size()) return {coeffs_.begin(), coeffs_.begin() + count};
    if (!lambda_) throw Error(ErrorKind::TruncationInsufficient, "kernel has fewer coefficients than requested");
    return lambda_coeffs(*lambda_, count);
}

double DiagonalKernel::eval(cplx w) const {
    require_in_disk(w);
    const double r2 = std::norm(w);
    if (lambda_) return std::pow(1.0 - r2, -*lambda_);

    const std::size_t M = coeffs_.size();
    long double sum = 0.0L;
    long double p = 1.0L;
    for (std::size_t n = 0; n < M; ++n) {
        sum += coeffs_[n] * p;
        if (n + 1 < M) p *= r2;
    }
    if (r2 == 0.0) return static_cast<double>(sum);
    const double last = coeffs_[M - 1] * static_cast<double>(p);
    if (!(last < 1e-16)) throw Error(ErrorKind::TruncationInsufficient, "tail term a_{M-1}|w|^{2(M-1)} not below 1e-16");
    if (M < 2) throw Error(ErrorKind::TruncationInsufficient, "cannot certify tail with one coefficient");
    const double q = coeffs_[M - 1] / coeffs_[M - 2] * r2;
    if (!(q < 1.0)) throw Error(ErrorKind::TruncationInsufficient, "ratio test does not certify the tail");
    const double remainder = last * q / (1.0 - q);
    if (!(remainder < 1e-12 * static_cast<double>(sum)))
        throw Error(ErrorKind::TruncationInsufficient, "certified remainder above 1e-12 relative");
    return static_cast<double>(sum);
}

DiagonalKernel lambda_kernel(double lambda, std::size_t M) { return DiagonalKernel::lambda_family(lambda, M); }

double eval_diag(const DiagonalKernel& k, cplx w) { return k.eval(w); }

const char* to_string(GrowthTag tag) {
    switch (tag) {
        case GrowthTag::Diverges: return "diverges";
        case GrowthTag::Bounded: return "bounded";
        case GrowthTag::Vanishes: return "vanishes";
    }
    return "?";
}

GrowthTag classify_growth(const std::vector<double>& radii, const std::vector<double>& values, double* slope) {
    if (radii.size() != values.size() || radii.size() < 2)
        throw Error(ErrorKind::InvalidParameter, "growth classifier needs at least two samples");
    const std::size_t m = std::min<std::size_t>(3, radii.size());
    const std::size_t start = radii.size() - m;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < radii.size(); ++i) {
        const double x = std::log(1.0 - radii[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double s = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope) *slope = s;
    if (s < -0.1) return GrowthTag::Diverges;
    if (s > 0.1) return GrowthTag::Vanishes;
    return GrowthTag::Bounded;
}

RatioProfile kernel_ratio_profile(const DiagonalKernel& k1, const DiagonalKernel& k2, const std::vector<double>& radii) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw Error(ErrorKind::InvalidParameter, "radii must lie in (0,1)");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw Error(ErrorKind::InvalidParameter, "radii must increase strictly");
    }
    RatioProfile out;
    std::vector<double> values;
    for (double r : radii) {
        const double v = k1.eval(r) / k2.eval(r);
        out.samples.emplace_back(r, v);
        values.push_back(v);
    }
    out.tag = classify_growth(radii, values, &out.slope);
    return out;
}

}  // namespace cfbkit
