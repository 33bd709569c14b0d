#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cfbkit/shifts.hpp"

namespace cfbkit {

enum class HStatus { Holds, CriterionNotMet, Inconclusive };
enum class HCriterion { KernelRatio, NormLimit, WeightProduct, LambdaGap, BruteForce };
const char* to_string(HStatus s);
const char* to_string(HCriterion c);

struct PropertyHVerdict {
    HStatus status = HStatus::Inconclusive;
    HCriterion criterion = HCriterion::LambdaGap;
    std::vector<std::pair<double, double>> trace;
    double slope = 0.0;
    std::string note;
};

/// Holds iff lambda2 - lambda1 < 2.
PropertyHVerdict check_lambda_gap(double lambda1, double lambda2);

/// Growth of K1(r,r)/K2(r,r); divergence leaves only the zero intertwiner.
PropertyHVerdict check_kernel_ratio(const DiagonalKernel& k1, const DiagonalKernel& k2, const std::vector<double>& radii);

/// Log-slope of s_n = n prod_{k<n} b_k / a_k over dyadic n <= n_max.
PropertyHVerdict check_weight_product(const WeightSequence& a, const WeightSequence& b, std::size_t n_max);

/// Weights to supply per unit of n_max so norm windows can slide far into the tail.
inline constexpr std::size_t kNormLimitTail = 64;

/// Log-slope of q_n = ||T1^n|| ||S2^n|| / n over dyadic n <= n_max.
/// Windows only range over the supplied weights; short sequences underestimate ||T1^n|| for increasing weights.
PropertyHVerdict check_norm_limit(const WeightSequence& t1, const WeightSequence& t2, std::size_t n_max);

/// Column-major vectorization, as used by the Kronecker form of X -> AX - XB.
Vec vectorize(const Mat& X);
Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols);

/// X -> AX - XB as the matrix kron(I, A) - kron(B^T, I).
struct SylvesterSystem {
    Mat A;
    Mat B;
    Mat lhs;

    static SylvesterSystem build(const Mat& A, const Mat& B);
    Mat apply(const Mat& X) const;
};

inline constexpr int kBruteForceDimCap = 64;

struct BruteForceResult {
    PropertyHVerdict verdict;
    Mat kernel_basis;
    Mat range_basis;
    int rank = 0;
    int intersection_dim = 0;
    double min_principal_angle = 0.0;
    double smallest_nonzero_singular = 0.0;
};

/// ker(tau) and ran(tau) of tau(X) = AX - XB via SVD of the vectorized operator, with their intersection.
BruteForceResult brute_force_tau(const Mat& A, const Mat& B);

struct IntertwinerStructure {
    double below_diagonal = 0.0;
    double entry_law = 0.0;
};

/// For AX = XB with backward shifts of weights a, b: lower-triangular mass and deviation from
/// X(i, i+s) = prod_{k<i} b_{k+s} / a_k * X(0, s), both relative to max|X|.
IntertwinerStructure check_intertwiner_structure(const Mat& X, const WeightSequence& a, const WeightSequence& b);

}  // namespace cfbkit
