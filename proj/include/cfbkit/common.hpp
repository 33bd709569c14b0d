#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cfbkit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class ErrorKind {
    InvalidParameter,
    OutOfDomain,
    TruncationInsufficient,
    DegenerateSymbol,
    Unsupported,
    NearSingular,
    ConstructionRejected,
    StructureViolation,
    SingularFrame,
    InvalidWitness,
    NotDecomposable,
    DimensionCap,
    OutOfScopeParameters,
    IndexRange,
    Precondition,
    NotFound,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Throws OutOfDomain unless |w| < 1.
void require_in_disk(cplx w);

/// Points of a count x count Cartesian grid on [-radius, radius]^2 that lie in |w| <= radius.
std::vector<cplx> disk_grid(double radius, int count);

/// Spectral norm.
double op_norm(const Mat& m);

/// Ratio of extreme singular values; infinity when singular.
double condition_number(const Mat& m);

/// Block (i, j) of a block matrix with square blocks of size n.
Mat block(const Mat& m, int i, int j, int n);

/// Largest Frobenius norm among the leading interior x interior corners of all blocks.
double interior_block_norm(const Mat& m, int blocks, int n, int interior);

}  // namespace cfbkit
