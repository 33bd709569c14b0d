#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cfbkit/cfb.hpp"

namespace cfbkit {

inline constexpr double kStencilStep = 1e-3;
inline constexpr double kDerivativeStep = 5e-3;

enum class Direction { W, WBar };
enum class FieldSource { ClosedForm, FiniteDifference };
enum class CurvatureMethod { Auto, ClosedForm, FiniteDifference };

using RealField = std::function<double(cplx)>;
using MatrixField = std::function<Mat(cplx)>;
/// Frame vectors as the columns of an N x n matrix, holomorphic in w.
using Frame = std::function<Mat(cplx)>;

/// (1/4) Laplacian of f at w: 5-point stencil at steps h and 2h, one Richardson level.
double ddbar(const RealField& f, cplx w, double h = kStencilStep);

/// Wirtinger derivative d/dw or d/dwbar by Richardson-extrapolated central differences.
cplx wirtinger(const std::function<cplx(cplx)>& f, cplx w, Direction dir, double h = kDerivativeStep);
Mat wirtinger(const MatrixField& f, cplx w, Direction dir, double h = kDerivativeStep);

struct CurvatureField {
    std::vector<cplx> grid;
    std::vector<cplx> values;
    std::vector<Direction> history;
    FieldSource source = FieldSource::ClosedForm;
    double step = 0.0;
    std::string note;

    int order_w() const;
    int order_wbar() const;
};

/// -ddbar log K(w,w); closed form -lambda (1-|w|^2)^-2 for lambda-family kernels under Auto.
CurvatureField curvature_rank1(const DiagonalKernel& k, const std::vector<cplx>& grid,
                               CurvatureMethod method = CurvatureMethod::Auto);

/// -ddbar log h for an arbitrary positive metric h(w) = ||t(w)||^2.
CurvatureField curvature_from_metric(const RealField& metric, const std::vector<cplx>& grid);

/// Covariant derivative of a rank-1 field; the commutator term vanishes for scalars.
CurvatureField covariant_derivative(const CurvatureField& field, const DiagonalKernel& k, Direction dir,
                                    int max_order = 2);

enum class SffVariant { Classical, Generalized };

struct SecondFundamentalForm {
    std::vector<cplx> grid;
    std::vector<double> values;
    SffVariant variant = SffVariant::Generalized;
    /// Largest relative truncation tail of ||t_{i+1}||^2 over the grid.
    double truncation_bound = 0.0;
};

/// ||B t_{i+1}(w)||^2 / ||t_{i+1}(w)||^2 with truncated sections.
double sff_ratio(const Mat& block, const DiagonalKernel& k_next, cplx w);

/// K(w) / (ratio - K(w))^(1/2), with K the curvature of the first diagonal block.
SecondFundamentalForm sff_classical(const DiagonalKernel& k1, const Mat& block, const DiagonalKernel& k2,
                                    const std::vector<cplx>& grid);

/// Norm ratio of block (i, i+1) on sections of block i+1 (0-based i).
SecondFundamentalForm sff_generalized(const CfbOperator& T, int i, const std::vector<cplx>& grid);

struct MatrixCurvatureField {
    std::vector<cplx> grid;
    std::vector<Mat> values;
    std::vector<Direction> history;
};

/// Gram matrix h = G* G of the frame.
Mat gram(const Frame& frame, cplx w);

/// -dbar(h^-1 dh) by nested Wirtinger differences.
MatrixCurvatureField curvature_rank_n(const Frame& frame, const std::vector<cplx>& grid,
                                      double h = kStencilStep);

/// Covariant derivative with the commutator [h^-1 dh, K] in the w direction.
MatrixCurvatureField covariant_derivative(const MatrixCurvatureField& field, const Frame& frame, Direction dir,
                                          int max_order = 2, double h = kStencilStep);

std::string to_csv(const CurvatureField& f);
std::string to_csv(const SecondFundamentalForm& f);

}  // namespace cfbkit
