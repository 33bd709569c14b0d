#include "cfbkit/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cfbkit {

namespace {

constexpr double kEps = 2.220446049250313e-16;

std::vector<cplx> expand_roots(const std::vector<cplx>& roots, cplx scale) {
    std::vector<cplx> c{scale};
    for (const cplx& r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j + 1] += c[j];
            next[j] -= r * c[j];
        }
        c = std::move(next);
    }
    return c;
}

RootLocation locate(cplx r) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) <= kBoundaryBand) return RootLocation::Boundary;
    return m < 1.0 ? RootLocation::Interior : RootLocation::Exterior;
}

std::string describe(cplx z) {
    std::ostringstream os;
    os.precision(6);
    if (z.imag() == 0.0)
        os << z.real();
    else
        os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

// Normalized size of the j-th Taylor coefficient of p at c.
double taylor_coeff_ratio(const std::vector<cplx>& p, cplx c, int j) {
    cplx val = 0.0;
    double scale = 0.0;
    for (std::size_t k = j; k < p.size(); ++k) {
        double binom = 1.0;
        for (int i = 0; i < j; ++i) binom = binom * (k - i) / (i + 1);
        const cplx term = p[k] * binom * std::pow(c, static_cast<double>(k - j));
        val += term;
        scale += std::abs(term);
    }
    return scale > 0.0 ? std::abs(val) / scale : 0.0;
}

struct Cluster {
    cplx center;
    int mult;
};

std::vector<Cluster> cluster_roots(const std::vector<cplx>& roots, const std::vector<cplx>* poly) {
    std::vector<Cluster> cl;
    for (const cplx& r : roots) {
        bool merged = false;
        for (auto& c : cl) {
            if (std::abs(c.center - r) <= 1e-8 * (1.0 + std::abs(c.center))) {
                c.center = (c.center * static_cast<double>(c.mult) + r) / static_cast<double>(c.mult + 1);
                ++c.mult;
                merged = true;
                break;
            }
        }
        if (!merged) cl.push_back({r, 1});
    }
    if (!poly) return cl;
    // Eigenvalues of a multiple root split by about eps^(1/m); merge such clusters when the
    // polynomial's low-order Taylor coefficients at the merged center vanish.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < cl.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < cl.size() && !changed; ++j) {
                const int m = cl[i].mult + cl[j].mult;
                const cplx c = (cl[i].center * static_cast<double>(cl[i].mult) +
                                cl[j].center * static_cast<double>(cl[j].mult)) /
                               static_cast<double>(m);
                const double radius = 10.0 * std::pow(kEps, 1.0 / m) * (1.0 + std::abs(c));
                if (std::abs(cl[i].center - cl[j].center) > radius) continue;
                bool ok = true;
                for (int d = 0; d < m && ok; ++d)
                    ok = taylor_coeff_ratio(*poly, c, d) <= 1e3 * std::pow(kEps, 1.0 - static_cast<double>(d) / m);
                if (!ok) continue;
                cl[i] = {c, m};
                cl.erase(cl.begin() + j);
                changed = true;
            }
        }
    }
    return cl;
}

std::vector<Cluster> symbol_clusters(const AnalyticSymbol& phi) {
    if (phi.kind() != SymbolKind::Polynomial) throw Error(ErrorKind::Unsupported, "zeros of truncated series");
    if (phi.is_zero()) throw Error(ErrorKind::DegenerateSymbol, "zero polynomial");
    if (phi.known_roots()) return cluster_roots(*phi.known_roots(), nullptr);

    const auto& c = phi.coeffs();
    const int d = phi.degree();
    int low = 0;
    while (c[low] == cplx(0.0)) ++low;
    std::vector<cplx> roots(low, cplx(0.0));
    const int m = d - low;
    if (m > 0) {
        Mat comp = Mat::Zero(m, m);
        for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < m; ++i) comp(i, m - 1) = -c[low + i] / c[d];
        Eigen::ComplexEigenSolver<Mat> es(comp, false);
        for (int i = 0; i < m; ++i) roots.push_back(es.eigenvalues()(i));
    }
    std::vector<cplx> poly(c.begin(), c.begin() + d + 1);
    return cluster_roots(roots, &poly);
}

}  // namespace

AnalyticSymbol AnalyticSymbol::polynomial(std::vector<cplx> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    AnalyticSymbol s;
    s.coeffs_ = std::move(coeffs);
    const int d = s.degree();
    s.scale_ = d >= 0 ? s.coeffs_[d] : cplx(0.0);
    return s;
}

AnalyticSymbol AnalyticSymbol::from_roots(const std::vector<cplx>& roots, cplx scale) {
    AnalyticSymbol s = polynomial(expand_roots(roots, scale));
    if (scale != cplx(0.0)) s.roots_ = roots;
    s.scale_ = scale;
    return s;
}

AnalyticSymbol AnalyticSymbol::series(std::vector<cplx> coeffs, double tail_bound, double cert_radius) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    AnalyticSymbol s;
    s.coeffs_ = std::move(coeffs);
    s.kind_ = SymbolKind::TruncatedSeries;
    s.tail_bound_ = tail_bound;
    s.cert_radius_ = cert_radius;
    return s;
}

int AnalyticSymbol::degree() const {
    for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 0; --j)
        if (coeffs_[j] != cplx(0.0)) return j;
    return -1;
}

cplx AnalyticSymbol::operator()(cplx z) const {
    cplx acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cplx AnalyticSymbol::conj_eval(cplx w) const { return std::conj((*this)(std::conj(w))); }

AnalyticSymbol AnalyticSymbol::conjugate() const {
    AnalyticSymbol s = *this;
    for (auto& c : s.coeffs_) c = std::conj(c);
    if (s.roots_)
        for (auto& r : *s.roots_) r = std::conj(r);
    s.scale_ = std::conj(scale_);
    return s;
}

AnalyticSymbol AnalyticSymbol::operator*(const AnalyticSymbol& other) const {
    const std::size_t n = coeffs_.size() + other.coeffs_.size() - 1;
    if (kind_ == SymbolKind::Polynomial && other.kind_ == SymbolKind::Polynomial) {
        AnalyticSymbol s = polynomial(series::mul(coeffs_, other.coeffs_, n));
        if (roots_ && other.roots_) {
            std::vector<cplx> r = *roots_;
            r.insert(r.end(), other.roots_->begin(), other.roots_->end());
            s.roots_ = std::move(r);
            s.scale_ = scale_ * other.scale_;
        }
        return s;
    }
    const std::size_t m = std::min(coeffs_.size(), other.coeffs_.size());
    const auto l1 = [](const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& c : v) s += std::abs(c);
        return s;
    };
    const double tail = tail_bound_ * (l1(other.coeffs_) + other.tail_bound_) + other.tail_bound_ * l1(coeffs_);
    return series(series::mul(coeffs_, other.coeffs_, std::max(m, std::size_t{1})), tail,
                  std::min(cert_radius_, other.cert_radius_));
}

AnalyticSymbol AnalyticSymbol::scaled(cplx c) const {
    AnalyticSymbol s = *this;
    for (auto& x : s.coeffs_) x *= c;
    s.tail_bound_ *= std::abs(c);
    s.scale_ *= c;
    if (c == cplx(0.0)) s.roots_.reset();
    return s;
}

namespace series {

std::vector<cplx> mul(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n) {
    std::vector<cplx> out(n, 0.0);
    for (std::size_t i = 0; i < a.size() && i < n; ++i) {
        if (a[i] == cplx(0.0)) continue;
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<cplx> div(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n) {
    if (b.empty() || b[0] == cplx(0.0)) throw Error(ErrorKind::DegenerateSymbol, "series division by b with b(0) = 0");
    std::vector<cplx> q(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = k < a.size() ? a[k] : cplx(0.0);
        for (std::size_t j = 1; j <= k && j < b.size(); ++j) acc -= b[j] * q[k - j];
        q[k] = acc / b[0];
    }
    return q;
}

std::vector<cplx> compose(const std::vector<cplx>& p, const std::vector<cplx>& s, std::size_t n) {
    std::vector<cplx> acc(n, 0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = mul(acc, s, n);
        acc[0] += *it;
    }
    return acc;
}

std::vector<cplx> derivative(const std::vector<cplx>& a) {
    if (a.size() <= 1) return {cplx(0.0)};
    std::vector<cplx> d(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = a[k] * static_cast<double>(k);
    return d;
}

std::vector<cplx> padded(const std::vector<cplx>& a, std::size_t n) {
    std::vector<cplx> out(n, 0.0);
    for (std::size_t i = 0; i < a.size() && i < n; ++i) out[i] = a[i];
    return out;
}

}  // namespace series

const char* to_string(RootLocation loc) {
    switch (loc) {
        case RootLocation::Interior: return "interior";
        case RootLocation::Boundary: return "boundary";
        case RootLocation::Exterior: return "exterior";
    }
    return "?";
}

const char* to_string(RatioBound r) {
    switch (r) {
        case RatioBound::Bounded: return "Bounded";
        case RatioBound::Unbounded: return "Unbounded";
        case RatioBound::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::vector<Zero> zeros_in_disk(const AnalyticSymbol& phi) {
    std::vector<Zero> out;
    for (const auto& c : symbol_clusters(phi)) out.push_back({c.center, c.mult, locate(c.center)});
    std::sort(out.begin(), out.end(), [](const Zero& x, const Zero& y) {
        if (std::abs(x.root) != std::abs(y.root)) return std::abs(x.root) < std::abs(y.root);
        return std::arg(x.root) < std::arg(y.root);
    });
    return out;
}

RatioDecision ratio_bounded_both_ways(const AnalyticSymbol& phi, const AnalyticSymbol& psi) {
    const auto zp = zeros_in_disk(phi);
    const auto zq = zeros_in_disk(psi);
    for (const auto* zs : {&zp, &zq})
        for (const auto& z : *zs)
            if (z.location == RootLocation::Boundary)
                return {RatioBound::Inconclusive, "boundary zero at " + describe(z.root)};

    auto interior = [](const std::vector<Zero>& zs) {
        std::vector<Zero> out;
        for (const auto& z : zs)
            if (z.location == RootLocation::Interior) out.push_back(z);
        return out;
    };
    const auto ip = interior(zp);
    auto iq = interior(zq);
    for (const auto& z : ip) {
        auto it = std::find_if(iq.begin(), iq.end(), [&](const Zero& y) {
            return std::abs(y.root - z.root) <= 1e-6 * (1.0 + std::abs(z.root));
        });
        if (it == iq.end()) return {RatioBound::Unbounded, "zero " + describe(z.root) + " unmatched"};
        if (it->multiplicity != z.multiplicity) {
            std::ostringstream os;
            os << "zero " << describe(z.root) << " has multiplicity " << z.multiplicity << " vs " << it->multiplicity;
            return {RatioBound::Unbounded, os.str()};
        }
        iq.erase(it);
    }
    if (!iq.empty()) return {RatioBound::Unbounded, "zero " + describe(iq.front().root) + " unmatched"};
    return {RatioBound::Bounded, ""};
}

AnalyticSymbol quotient_series(const AnalyticSymbol& num, const AnalyticSymbol& den, std::size_t n) {
    auto cn = symbol_clusters(num);
    auto cd = symbol_clusters(den);
    const cplx sn = num.coeffs()[num.degree()];
    const cplx sd = den.coeffs()[den.degree()];
    std::vector<cplx> keep_den;
    for (const auto& z : cd) {
        if (locate(z.center) == RootLocation::Exterior) {
            keep_den.insert(keep_den.end(), z.mult, z.center);
            continue;
        }
        auto it = std::find_if(cn.begin(), cn.end(), [&](const Cluster& y) {
            return std::abs(y.center - z.center) <= 1e-6 * (1.0 + std::abs(z.center));
        });
        if (it == cn.end() || it->mult < z.mult)
            throw Error(ErrorKind::DegenerateSymbol, "quotient has a pole at " + describe(z.center));
        it->mult -= z.mult;
    }
    std::vector<cplx> keep_num;
    for (const auto& z : cn) keep_num.insert(keep_num.end(), z.mult, z.center);
    const auto pn = expand_roots(keep_num, sn);
    if (keep_den.empty()) {
        std::vector<cplx> c(pn.size());
        for (std::size_t i = 0; i < pn.size(); ++i) c[i] = pn[i] / sd;
        return AnalyticSymbol::polynomial(std::move(c));
    }
    const auto pd = expand_roots(keep_den, sd);
    auto q = series::div(pn, pd, n);
    double rmin = std::abs(keep_den.front());
    for (const cplx& r : keep_den) rmin = std::min(rmin, std::abs(r));
    const double rho = 1.0 / rmin;
    const double tail = std::abs(q.back()) * static_cast<double>(n) * rho / (1.0 - rho);
    return AnalyticSymbol::series(std::move(q), tail, 1.0);
}

Mat symbol_operator(const AnalyticSymbol& phi, const DiagonalKernel& source, const DiagonalKernel& target, int N) {
    if (phi.kind() == SymbolKind::Polynomial && phi.degree() >= N)
        throw Error(ErrorKind::TruncationInsufficient, "symbol degree must be below N");
    const auto as = source.coeffs_upto(N);
    const auto at = target.coeffs_upto(N);
    const auto& c = phi.coeffs();
    Mat M = Mat::Zero(N, N);
    for (int m = 0; m < N; ++m)
        for (int j = 0; m + j < N && j < static_cast<int>(c.size()); ++j)
            if (c[j] != cplx(0.0)) M(m, m + j) = std::conj(c[j]) * std::sqrt(at[m] / as[m + j]);
    return M;
}

Mat multiplication_operator(const AnalyticSymbol& phi, const DiagonalKernel& source, const DiagonalKernel& target,
                            int N) {
    return symbol_operator(phi, source, target, N).adjoint();
}

MobiusMap::MobiusMap(cplx a_, double theta_) : a(a_), theta(theta_) {
    if (!(std::abs(a) < 1.0)) throw Error(ErrorKind::InvalidParameter, "Mobius parameter needs |a| < 1");
}

cplx MobiusMap::operator()(cplx z) const { return std::polar(1.0, theta) * (z - a) / (1.0 - std::conj(a) * z); }

cplx MobiusMap::derivative(cplx z) const {
    const cplx d = 1.0 - std::conj(a) * z;
    return std::polar(1.0, theta) * (1.0 - std::norm(a)) / (d * d);
}

MobiusMap MobiusMap::inverse() const { return MobiusMap(-a * std::polar(1.0, theta), -theta); }

std::vector<cplx> MobiusMap::taylor(std::size_t n) const {
    std::vector<cplx> c(n, 0.0);
    if (n == 0) return c;
    const cplx rot = std::polar(1.0, theta);
    c[0] = -rot * a;
    cplx p = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        c[k] = rot * p * (1.0 - std::norm(a));
        p *= std::conj(a);
    }
    return c;
}

Mat mobius_of_operator(const MobiusMap& m, const Mat& T) {
    const Eigen::Index n = T.rows();
    const Mat I = Mat::Identity(n, n);
    const Mat R = I - std::conj(m.a) * T;
    if (condition_number(R) >= 1e8) throw Error(ErrorKind::NearSingular, "resolvent I - conj(a)T is ill-conditioned");
    Eigen::PartialPivLU<Mat> lu(R);
    return std::polar(1.0, m.theta) * lu.solve(T - m.a * I);
}

Mat composition_operator(const std::vector<cplx>& psi, const DiagonalKernel& k, int N) {
    if (psi.empty()) throw Error(ErrorKind::InvalidParameter, "empty map series");
    if (!(std::abs(psi[0]) < 1.0 - 1e-8))
        throw Error(ErrorKind::TruncationInsufficient, "map value at 0 too close to the unit circle");
    const auto a = k.coeffs_upto(N);
    const auto s = series::padded(psi, N);
    Mat C = Mat::Zero(N, N);
    std::vector<cplx> p(N, 0.0);
    p[0] = 1.0;
    for (int m = 0; m < N; ++m) {
        for (int n = 0; n < N; ++n) C(n, m) = p[n] * std::sqrt(a[m] / a[n]);
        p = series::mul(p, s, N);
    }
    if (!C.allFinite()) throw Error(ErrorKind::TruncationInsufficient, "composition coefficients overflowed");
    return C;
}

Mat composition_operator(const MobiusMap& m, const DiagonalKernel& k, int N) {
    return composition_operator(m.taylor(N), k, N);
}

}  // namespace cfbkit
