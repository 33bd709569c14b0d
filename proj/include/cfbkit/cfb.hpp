#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cfbkit/property_h.hpp"
#include "cfbkit/symbols.hpp"

namespace cfbkit {

struct CfbSpec {
    std::vector<DiagonalKernel> kernels;
    std::vector<AnalyticSymbol> superdiag;
    /// Cofactor symbols keyed by 0-based block index (i, j), j - i >= 2; absent entries are zero.
    std::map<std::pair<int, int>, AnalyticSymbol> cofactors;
    int N = 16;
    /// Build-time invariant checks; disabling them is an experiment-only override.
    bool verify = true;
    /// Supplied Property (H) verdicts for adjacent pairs; computed when empty.
    std::vector<PropertyHVerdict> h_evidence;
};

struct EdgeMask {
    /// Leading rows/columns of every block where truncated identities hold exactly.
    int interior_dim = 0;
    /// Per block (i, j), i <= j: N minus accumulated symbol degrees and shift steps.
    std::map<std::pair<int, int>, int> per_block;
};

class CfbOperator {
public:
    int n() const { return static_cast<int>(kernels_.size()); }
    int N() const { return N_; }
    const std::vector<DiagonalKernel>& kernels() const { return kernels_; }
    const std::vector<AnalyticSymbol>& superdiag() const { return superdiag_; }
    AnalyticSymbol cofactor(int i, int j) const;
    const std::map<std::pair<int, int>, AnalyticSymbol>& cofactors() const { return cofactors_; }
    const Mat& assembled() const { return assembled_; }
    Mat block(int i, int j) const { return cfbkit::block(assembled_, i, j, N_); }
    const EdgeMask& edge() const { return edge_; }
    const std::vector<PropertyHVerdict>& h_evidence() const { return h_evidence_; }
    /// Operator with the same diagonal and superdiagonal and all cofactors dropped.
    Mat bidiagonal_part() const;

    friend CfbOperator build_cfb(const CfbSpec& spec);

private:
    std::vector<DiagonalKernel> kernels_;
    std::vector<AnalyticSymbol> superdiag_;
    std::map<std::pair<int, int>, AnalyticSymbol> cofactors_;
    int N_ = 0;
    Mat assembled_;
    EdgeMask edge_;
    std::vector<PropertyHVerdict> h_evidence_;
};

/// Assemble the block upper-triangular operator and verify its invariants.
CfbOperator build_cfb(const CfbSpec& spec);

struct SiResult {
    bool strongly_irreducible = true;
    /// 0-based index i of a vanishing block (i, i+1).
    std::optional<int> witness;
    /// Block index ranges [first, last] of the direct-sum split when reducible.
    std::vector<std::pair<int, int>> components;
    /// Norm of the coupling between the components; zero for a genuine split.
    double coupling_norm = 0.0;
};

SiResult strongly_irreducible(const CfbOperator& T);

std::vector<TruncatedShift> diag_part(const CfbOperator& T);

/// Interior norm of diag{T} T - T diag{T}.
double diag_commutator_residual(const CfbOperator& T);

}  // namespace cfbkit
