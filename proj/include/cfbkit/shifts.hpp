#pragma once

#include <optional>
#include <vector>

#include "cfbkit/kernels.hpp"

namespace cfbkit {

/// Backward-shift weights d_n = sqrt(a_n / a_{n+1}).
struct WeightSequence {
    std::vector<double> weights;
    double inf = 0.0;
    double sup = 0.0;
    std::optional<double> lambda;

    static WeightSequence from_kernel(const DiagonalKernel& k, std::size_t count);
    static WeightSequence from_weights(std::vector<double> weights);
};

struct TruncatedShift {
    Mat matrix;
    WeightSequence weights;
    DiagonalKernel source;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

struct SectionVector {
    cplx w;
    Vec coords;
};

/// N x N compression of the backward shift: entry (n, n+1) = d_n.
TruncatedShift shift_from_kernel(const DiagonalKernel& k, int N);

/// coords[n] = sqrt(a_n) w^n.
SectionVector section(const DiagonalKernel& k, cplx w, int N);

/// ||T t - w t|| for the truncated section.
double eigen_residual(const TruncatedShift& T, cplx w);

struct WeightProductSample {
    std::size_t n = 0;
    double product = 0.0;
    std::optional<double> normalized;
};

/// Running products prod_{k<=n} d_k for n = 0..n_max; normalized by (n+1)^((1-lambda)/2) when lambda is known.
std::vector<WeightProductSample> weight_product_asymptotics(const WeightSequence& ws, std::size_t n_max);

/// ||T^n|| (or ||S^n|| for the forward right inverse) over the stored weight range.
double operator_norm_power(const WeightSequence& ws, std::size_t n, bool right_inverse);

}  // namespace cfbkit
