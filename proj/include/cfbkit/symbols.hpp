#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfbkit/kernels.hpp"

namespace cfbkit {

enum class SymbolKind { Polynomial, TruncatedSeries };

/// Polynomial or truncated power series phi(z) = sum c_j z^j.
class AnalyticSymbol {
public:
    AnalyticSymbol() : coeffs_{cplx(0.0)} {}

    static AnalyticSymbol polynomial(std::vector<cplx> coeffs);
    static AnalyticSymbol constant(cplx c) { return polynomial({c}); }
    static AnalyticSymbol identity() { return polynomial({0.0, 1.0}); }
    /// scale * prod (z - r); the roots are remembered with exact multiplicities.
    static AnalyticSymbol from_roots(const std::vector<cplx>& roots, cplx scale);
    /// Series whose tail beyond the stored coefficients is at most tail_bound on |z| <= cert_radius.
    static AnalyticSymbol series(std::vector<cplx> coeffs, double tail_bound, double cert_radius);

    SymbolKind kind() const { return kind_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    double tail_bound() const { return tail_bound_; }
    double cert_radius() const { return cert_radius_; }
    const std::optional<std::vector<cplx>>& known_roots() const { return roots_; }
    cplx leading_scale() const { return scale_; }

    /// Index of the last nonzero coefficient; -1 for the zero symbol.
    int degree() const;
    bool is_zero() const { return degree() < 0; }

    cplx operator()(cplx z) const;
    /// phi*(w) = conj(phi(conj(w))).
    cplx conj_eval(cplx w) const;
    /// Symbol with coefficients conj(c_j).
    AnalyticSymbol conjugate() const;

    AnalyticSymbol operator*(const AnalyticSymbol& other) const;
    AnalyticSymbol scaled(cplx c) const;

private:
    std::vector<cplx> coeffs_;
    SymbolKind kind_ = SymbolKind::Polynomial;
    double tail_bound_ = 0.0;
    double cert_radius_ = 1.0;
    std::optional<std::vector<cplx>> roots_;
    cplx scale_ = 1.0;
};

namespace series {
std::vector<cplx> mul(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n);
/// a / b truncated to n terms; b[0] must be nonzero.
std::vector<cplx> div(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n);
/// p(s(z)) truncated to n terms, for polynomial p.
std::vector<cplx> compose(const std::vector<cplx>& p, const std::vector<cplx>& s, std::size_t n);
std::vector<cplx> derivative(const std::vector<cplx>& a);
std::vector<cplx> padded(const std::vector<cplx>& a, std::size_t n);
}  // namespace series

enum class RootLocation { Interior, Boundary, Exterior };
const char* to_string(RootLocation loc);

struct Zero {
    cplx root;
    int multiplicity = 1;
    RootLocation location = RootLocation::Interior;
};

inline constexpr double kBoundaryBand = 1e-6;

/// All roots with multiplicity, each tagged by location relative to the unit circle.
std::vector<Zero> zeros_in_disk(const AnalyticSymbol& phi);

enum class RatioBound { Bounded, Unbounded, Inconclusive };
const char* to_string(RatioBound r);

struct RatioDecision {
    RatioBound status = RatioBound::Bounded;
    std::string obstruction;
};

/// Whether phi/psi and psi/phi are both bounded holomorphic on the disk.
RatioDecision ratio_bounded_both_ways(const AnalyticSymbol& phi, const AnalyticSymbol& psi);

/// num/den as a power series with n terms, after cancelling the zeros of den inside the closed disk.
/// Throws DegenerateSymbol if a zero of den in the closed disk is not matched by num.
AnalyticSymbol quotient_series(const AnalyticSymbol& num, const AnalyticSymbol& den, std::size_t n);

/// Adjoint of multiplication by phi, from the source space into the target space.
/// Entry (m, m+j) = conj(c_j) sqrt(a_m^tgt / a_{m+j}^src).
Mat symbol_operator(const AnalyticSymbol& phi, const DiagonalKernel& source, const DiagonalKernel& target, int N);

/// Multiplication by phi from the target space into the source space (adjoint of symbol_operator).
Mat multiplication_operator(const AnalyticSymbol& phi, const DiagonalKernel& source, const DiagonalKernel& target,
                            int N);

/// z -> e^{i theta} (z - a) / (1 - conj(a) z).
struct MobiusMap {
    cplx a = 0.0;
    double theta = 0.0;

    MobiusMap() = default;
    MobiusMap(cplx a_, double theta_);

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    MobiusMap inverse() const;
    /// Taylor coefficients at 0, n terms.
    std::vector<cplx> taylor(std::size_t n) const;
};

/// e^{i theta} (T - aI)(I - conj(a) T)^{-1}; NearSingular when the resolvent condition number exceeds 1e8.
Mat mobius_of_operator(const MobiusMap& m, const Mat& T);

/// Matrix of f -> f o psi on the basis e_n = sqrt(a_n) z^n; psi given by Taylor coefficients.
Mat composition_operator(const std::vector<cplx>& psi, const DiagonalKernel& k, int N);
Mat composition_operator(const MobiusMap& m, const DiagonalKernel& k, int N);

}  // namespace cfbkit
