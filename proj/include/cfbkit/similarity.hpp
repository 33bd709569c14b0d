#pragma once

#include <string>
#include <vector>

#include "cfbkit/curvature.hpp"

namespace cfbkit {

enum class SimStatus { Similar, NotSimilar, Inconclusive };
const char* to_string(SimStatus s);

inline constexpr double kWitnessConditionCap = 1e6;
inline constexpr double kWitnessResidualTol = 1e-8;

struct SimilarityVerdict {
    SimStatus status = SimStatus::Inconclusive;
    /// Intertwiner X with X T = T~ X; empty unless a witness was built.
    Mat witness;
    double condition = 0.0;
    /// Interior norm of X T - T~ X relative to ||X|| ||T||.
    double residual = 0.0;
    std::string obstruction;
};

/// Zero/multiplicity decision for operators sharing kernels and cofactors, differing in superdiagonal symbols.
/// On Similar the block-diagonal witness X_i = M*_{psi_i}, psi_i = prod_{k>=i} phi~_k / phi_k, is verified.
SimilarityVerdict decide_multiplication_family(const CfbOperator& T, const CfbOperator& Tt);

/// Interior residual ||X T - Tt X|| / (||X|| ||T||) over all blocks.
double intertwining_residual(const Mat& X, const CfbOperator& T, const CfbOperator& Tt);

struct RecursiveIntertwiner {
    SimStatus status = SimStatus::Inconclusive;
    /// Strictly block upper-triangular K with (I + K) T = T~ (I + K).
    Mat K;
    /// Least-squares residual of each anti-diagonal stage, in stage order.
    std::vector<double> stage_residuals;
    double residual = 0.0;
};

/// Anti-diagonal recursion for K when T and T~ agree on the diagonal and superdiagonal blocks.
RecursiveIntertwiner recursive_intertwiner(const CfbOperator& T, const CfbOperator& Tt);

struct DiagonalReduction {
    std::vector<Mat> blocks;
    /// X_ii T_ii - T~_ii X_ii, interior norm.
    std::vector<double> diagonal_residuals;
    /// X_ii T_{i,i+1} - T~_{i,i+1} X_{i+1,i+1}, interior norm.
    std::vector<double> superdiagonal_residuals;
};

/// Diagonal blocks of an upper-triangular intertwiner together with their intertwining residuals.
DiagonalReduction diagonal_reduction(const CfbOperator& T, const CfbOperator& Tt, const Mat& X);

struct CurvatureMatchCertificate {
    std::vector<cplx> grid;
    std::vector<double> psi;
    std::vector<double> residual;
    double max_residual = 0.0;
    /// Largest deviation between the curvature of ||Y t||^2 and that of the second kernel; negative when unchecked.
    double conjugate_check = -1.0;
    double witness_norm = 0.0;
    SimStatus status = SimStatus::Inconclusive;
};

inline constexpr double kCurvatureMatchTol = 1e-5;

/// Psi = ||Phi t_1||^2 / ||t_1||^2 + 1 and residual K_1 - K_2 - ddbar log Psi; Y = (I + Phi* Phi)^(1/2) is checked too.
CurvatureMatchCertificate curvature_similarity_check(const DiagonalKernel& k1, const DiagonalKernel& k2, const Mat& Phi,
                                                     const std::vector<cplx>& grid);

/// Same residual for a directly supplied Psi.
CurvatureMatchCertificate curvature_similarity_check(const DiagonalKernel& k1, const DiagonalKernel& k2,
                                                     const RealField& psi, const std::vector<cplx>& grid);

struct BundleWitnesses {
    std::vector<Mat> Phi;
    double scale = 1.0;
};

/// Phi_i = (c^2 Y_i* Y_i - I)^(1/2) with one common c chosen so every radicand is positive semidefinite.
BundleWitnesses witnesses_from_intertwiners(const std::vector<Mat>& Y);

struct UnitaryPlusCompact {
    double alpha = 0.0;
    Mat X;
    Eigen::VectorXd g_eigenvalues;
    /// (alpha + g_k)^(1/2) - alpha^(1/2) for each eigenvalue g_k of Y* Y - I.
    Eigen::VectorXd k1_spectrum;
    double residual = 0.0;
};

/// Y* Y = X* X + (1 - alpha) I with X = (alpha I + Y* Y - I)^(1/2).
UnitaryPlusCompact unitary_plus_compact(const Mat& Y);

struct BundleWitnessReport {
    SimStatus status = SimStatus::Inconclusive;
    std::vector<double> curvature_residuals;
    std::vector<double> sff_residuals;
    /// Interior residual of the block-diagonal (I + Phi_i* Phi_i)^(1/2) as an intertwiner.
    double chain_residual = 0.0;
    std::string note;
};

inline constexpr double kBundleSffTol = 1e-6;

/// Checks both conditions for supplied bundle witnesses; never searches for them.
BundleWitnessReport bundle_witness_check(const CfbOperator& T, const CfbOperator& Tt, const std::vector<Mat>& Phi,
                                const std::vector<cplx>& grid);

enum class HomStatus { WeaklyHomogeneous, NotWeaklyHomogeneous, Inconclusive };
const char* to_string(HomStatus s);

struct MobiusIntertwiner {
    Mat X;
    double residual = 0.0;
    double condition = 0.0;
};

/// Block-diagonal X with X_i = M_{rho_i} C_m and sigma(T*) X = X T* on diagonal and first subdiagonal blocks.
MobiusIntertwiner mobius_intertwiner(const CfbOperator& T, const MobiusMap& m);

struct HomogeneityVerdict {
    HomStatus status = HomStatus::Inconclusive;
    std::string obstruction;
    std::vector<MobiusIntertwiner> samples;
};

inline constexpr double kMobiusResidualTol = 1e-6;

HomogeneityVerdict weak_homogeneity(const CfbOperator& T, const std::vector<MobiusMap>& samples);

}  // namespace cfbkit
