#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cfbkit/common.hpp"

namespace cfbkit {

struct LinearSolveReport {
    double residual = 0.0;
    int rank = 0;
    int nullity = 0;
    double condition = 0.0;
    int solution_dim = 0;
};

struct SylvesterSolution {
    Mat X;
    LinearSolveReport report;
    /// Orthonormal basis (columns, vectorized) of the solution space of AX - XB = 0.
    Mat null_basis;
};

/// Minimum-norm least-squares solution of AX - XB = C via SVD of the vectorized operator.
SylvesterSolution sylvester_solve(const Mat& A, const Mat& B, const Mat& C);

enum class Structure { Full, StrictUpper, Diagonal };

struct IntertwinerSearch {
    std::vector<Mat> basis;
    Mat best;
    double best_condition = 0.0;
    bool found = false;
    LinearSolveReport report;
};

/// Basis of {X : XT = Tt X} under a block structure, plus the best-conditioned of 50 seeded random combinations.
IntertwinerSearch direct_intertwiner(const Mat& T, const Mat& Tt, Structure structure, int block_size,
                                     std::uint64_t seed = 20240611, int draws = 50);

struct StructuredSolve {
    Mat X;
    LinearSolveReport report;
};

/// Minimum-norm solution of XT - Tt X = C with X restricted to the given block structure.
StructuredSolve solve_structured(const Mat& T, const Mat& Tt, const Mat& C, Structure structure, int block_size);

/// d dbar of a field sampled on a uniform Cartesian grid (rows index y, columns index x) with spacing step,
/// by composing Wirtinger central differences; entries within two steps of the border are left at zero.
Eigen::MatrixXd fd_dbar_dlog(const Eigen::MatrixXd& values, double step);

/// Pointwise variant on a callable field with one Richardson level.
double fd_dbar_dlog(const std::function<double(cplx)>& field, cplx w, double step);

}  // namespace cfbkit
