#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfbkit/common.hpp"

namespace cfbkit {

/// Diagonal reproducing kernel K(z,w) = sum a_n z^n conj(w)^n on the unit disk.
class DiagonalKernel {
public:
    /// Coefficient-list kernel; rescaled so that a_0 = 1.
    static DiagonalKernel from_coeffs(std::vector<double> coeffs, std::string label = {});
    /// (1 - z conj(w))^(-lambda), with M stored coefficients.
    static DiagonalKernel lambda_family(double lambda, std::size_t M);

    const std::vector<double>& coeffs() const { return coeffs_; }
    std::optional<double> lambda() const { return lambda_; }
    const std::string& label() const { return label_; }

    /// a_n; extends past the stored range for lambda-family kernels.
    double coeff(std::size_t n) const;
    std::vector<double> coeffs_upto(std::size_t count) const;

    /// K(w, w).
    double eval(cplx w) const;

private:
    std::vector<double> coeffs_;
    std::optional<double> lambda_;
    std::string label_;
};

DiagonalKernel lambda_kernel(double lambda, std::size_t M);
double eval_diag(const DiagonalKernel& k, cplx w);

enum class GrowthTag { Diverges, Bounded, Vanishes };
const char* to_string(GrowthTag tag);

struct RatioProfile {
    std::vector<std::pair<double, double>> samples;
    GrowthTag tag = GrowthTag::Bounded;
    double slope = 0.0;
};

/// Slope of log(value) against log(1 - r) over the three largest radii.
GrowthTag classify_growth(const std::vector<double>& radii, const std::vector<double>& values,
                          double* slope = nullptr);

RatioProfile kernel_ratio_profile(const DiagonalKernel& k1, const DiagonalKernel& k2,
                                  const std::vector<double>& radii);

}  // namespace cfbkit
