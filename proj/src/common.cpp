#include "cfbkit/common.hpp"

#include <cmath>
#include <limits>

namespace cfbkit {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::OutOfDomain: return "out-of-domain";
        case ErrorKind::TruncationInsufficient: return "truncation-insufficient";
        case ErrorKind::DegenerateSymbol: return "degenerate-symbol";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::NearSingular: return "near-singular";
        case ErrorKind::ConstructionRejected: return "construction-rejected";
        case ErrorKind::StructureViolation: return "structure-violation";
        case ErrorKind::SingularFrame: return "singular-frame";
        case ErrorKind::InvalidWitness: return "invalid-witness";
        case ErrorKind::NotDecomposable: return "not-U+K-decomposable-at-truncation";
        case ErrorKind::DimensionCap: return "dimension-cap";
        case ErrorKind::OutOfScopeParameters: return "out-of-scope-parameters";
        case ErrorKind::IndexRange: return "index-range";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::NotFound: return "not-found";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void require_in_disk(cplx w) {
    if (!(std::abs(w) < 1.0)) {
        throw Error(ErrorKind::OutOfDomain, "point outside the open unit disk");
    }
}

std::vector<cplx> disk_grid(double radius, int count) {
    if (count < 1 || radius < 0.0) throw Error(ErrorKind::InvalidParameter, "grid needs count >= 1, radius >= 0");
    std::vector<cplx> pts;
    if (count == 1) {
        pts.emplace_back(0.0, 0.0);
        return pts;
    }
    const double step = 2.0 * radius / (count - 1);
    for (int iy = 0; iy < count; ++iy) {
        for (int ix = 0; ix < count; ++ix) {
            cplx w(-radius + ix * step, -radius + iy * step);
            if (std::abs(w) <= radius * (1.0 + 1e-12)) pts.push_back(w);
        }
    }
    return pts;
}

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double condition_number(const Mat& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    double lo = s(s.size() - 1);
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / lo;
}

Mat block(const Mat& m, int i, int j, int n) { return m.block(i * n, j * n, n, n); }

double interior_block_norm(const Mat& m, int blocks, int n, int interior) {
    double worst = 0.0;
    for (int i = 0; i < blocks; ++i)
        for (int j = 0; j < blocks; ++j)
            worst = std::max(worst, m.block(i * n, j * n, interior, interior).norm());
    return worst;
}

}  // namespace cfbkit
