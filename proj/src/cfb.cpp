#include "cfbkit/cfb.hpp"

#include <sstream>

namespace cfbkit {

namespace {

PropertyHVerdict pair_evidence(const DiagonalKernel& k1, const DiagonalKernel& k2) {
    if (k1.lambda() && k2.lambda() && *k1.lambda() >= 1.0 && *k2.lambda() >= 1.0)
        return check_lambda_gap(*k1.lambda(), *k2.lambda());
    std::size_t len = 1 << 12;
    if (!k1.lambda()) len = std::min(len, k1.coeffs().size() - 1);
    if (!k2.lambda()) len = std::min(len, k2.coeffs().size() - 1);
    if (len < 8) {
        PropertyHVerdict v;
        v.note = "kernels too short for a weight-product fit";
        return v;
    }
    return check_weight_product(WeightSequence::from_kernel(k1, len), WeightSequence::from_kernel(k2, len), len);
}

int symbol_width(const AnalyticSymbol& s, int N) {
    return s.kind() == SymbolKind::Polynomial ? std::max(s.degree(), 0) : N;
}

}  // namespace

AnalyticSymbol CfbOperator::cofactor(int i, int j) const {
    auto it = cofactors_.find({i, j});
    return it == cofactors_.end() ? AnalyticSymbol::constant(0.0) : it->second;
}

Mat CfbOperator::bidiagonal_part() const {
    Mat out = Mat::Zero(assembled_.rows(), assembled_.cols());
    for (int i = 0; i < n(); ++i) {
        out.block(i * N_, i * N_, N_, N_) = block(i, i);
        if (i + 1 < n()) out.block(i * N_, (i + 1) * N_, N_, N_) = block(i, i + 1);
    }
    return out;
}

CfbOperator build_cfb(const CfbSpec& spec) {
    const int n = static_cast<int>(spec.kernels.size());
    const int N = spec.N;
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "need at least one block");
    if (N < 2) throw Error(ErrorKind::InvalidParameter, "truncation N must be at least 2");
    if (static_cast<int>(spec.superdiag.size()) != n - 1)
        throw Error(ErrorKind::InvalidParameter, "need exactly n - 1 superdiagonal symbols");
    for (const auto& [ij, sym] : spec.cofactors) {
        const auto [i, j] = ij;
        if (i < 0 || j >= n || j - i < 2) throw Error(ErrorKind::IndexRange, "cofactor index needs 0 <= i, j < n, j - i >= 2");
    }
    for (const auto& s : spec.superdiag)
        if (s.kind() == SymbolKind::Polynomial && s.degree() >= N)
            throw Error(ErrorKind::TruncationInsufficient, "symbol degree must be below N");

    CfbOperator T;
    T.kernels_ = spec.kernels;
    T.superdiag_ = spec.superdiag;
    T.cofactors_ = spec.cofactors;
    T.N_ = N;
    T.assembled_ = Mat::Zero(n * N, n * N);

    std::vector<Mat> diag(n), super(n > 1 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) diag[i] = shift_from_kernel(spec.kernels[i], N).matrix;
    for (int i = 0; i + 1 < n; ++i) super[i] = symbol_operator(spec.superdiag[i], spec.kernels[i + 1], spec.kernels[i], N);

    auto& edge = T.edge_;
    edge.interior_dim = N;
    for (int i = 0; i < n; ++i) {
        T.assembled_.block(i * N, i * N, N, N) = diag[i];
        edge.per_block[{i, i}] = N - 1;
        Mat chain = Mat::Identity(N, N);
        int width = 0;
        for (int j = i + 1; j < n; ++j) {
            chain = chain * super[j - 1];
            width += symbol_width(spec.superdiag[j - 1], N) + 1;
            Mat blk;
            int w = width;
            if (j == i + 1) {
                blk = chain;
            } else {
                auto it = spec.cofactors.find({i, j});
                if (it == spec.cofactors.end()) {
                    blk = Mat::Zero(N, N);
                } else {
                    blk = symbol_operator(it->second, spec.kernels[i], spec.kernels[i], N) * chain;
                    w += symbol_width(it->second, N);
                }
            }
            T.assembled_.block(i * N, j * N, N, N) = blk;
            edge.per_block[{i, j}] = N - w;
        }
    }
    for (const auto& [ij, d] : edge.per_block) edge.interior_dim = std::min(edge.interior_dim, d);
    if (spec.verify && edge.interior_dim < 1)
        throw Error(ErrorKind::ConstructionRejected, "empty truncation interior; increase N");
    edge.interior_dim = std::max(edge.interior_dim, 1);

    if (spec.verify) {
        const int m = N - 1;
        for (int i = 0; i + 1 < n; ++i) {
            const Mat r = diag[i] * super[i] - super[i] * diag[i + 1];
            const double tol = 1e-12 * (1.0 + op_norm(diag[i]) * op_norm(super[i]));
            if (r.topLeftCorner(m, m).norm() > tol) {
                std::ostringstream os;
                os << "intertwining fails at block (" << i << "," << i + 1 << ")";
                throw Error(ErrorKind::ConstructionRejected, os.str());
            }
        }
        for (const auto& [ij, sym] : spec.cofactors) {
            const int i = ij.first;
            const Mat C = symbol_operator(sym, spec.kernels[i], spec.kernels[i], N);
            const Mat r = C * diag[i] - diag[i] * C;
            if (r.topLeftCorner(m, m).norm() > 1e-12 * (1.0 + op_norm(C))) {
                std::ostringstream os;
                os << "cofactor (" << ij.first << "," << ij.second << ") does not commute with block " << i;
                throw Error(ErrorKind::ConstructionRejected, os.str());
            }
        }
    }

    if (!spec.h_evidence.empty()) {
        if (static_cast<int>(spec.h_evidence.size()) != n - 1)
            throw Error(ErrorKind::InvalidParameter, "need one Property (H) verdict per adjacent pair");
        T.h_evidence_ = spec.h_evidence;
    } else {
        for (int i = 0; i + 1 < n; ++i) T.h_evidence_.push_back(pair_evidence(spec.kernels[i], spec.kernels[i + 1]));
    }
    if (spec.verify) {
        for (int i = 0; i + 1 < n; ++i) {
            if (T.h_evidence_[i].status != HStatus::Holds) {
                std::ostringstream os;
                os << "no Property (H) evidence for blocks (" << i << "," << i + 1 << "): "
                   << to_string(T.h_evidence_[i].status);
                throw Error(ErrorKind::ConstructionRejected, os.str());
            }
        }
    }
    return T;
}

SiResult strongly_irreducible(const CfbOperator& T) {
    SiResult r;
    for (int i = 0; i + 1 < T.n(); ++i) {
        if (!T.superdiag()[i].is_zero()) continue;
        r.strongly_irreducible = false;
        r.witness = i;
        r.components = {{0, i}, {i + 1, T.n() - 1}};
        const int N = T.N();
        const int top = (i + 1) * N;
        r.coupling_norm = T.assembled().block(0, top, top, T.assembled().cols() - top).norm();
        break;
    }
    return r;
}

std::vector<TruncatedShift> diag_part(const CfbOperator& T) {
    std::vector<TruncatedShift> out;
    for (const auto& k : T.kernels()) out.push_back(shift_from_kernel(k, T.N()));
    return out;
}

double diag_commutator_residual(const CfbOperator& T) {
    Mat D = Mat::Zero(T.assembled().rows(), T.assembled().cols());
    for (int i = 0; i < T.n(); ++i) D.block(i * T.N(), i * T.N(), T.N(), T.N()) = T.block(i, i);
    const Mat C = D * T.assembled() - T.assembled() * D;
    return interior_block_norm(C, T.n(), T.N(), T.edge().interior_dim);
}

}  // namespace cfbkit
