#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace ssocert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input dimensions do not fit the operation.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is well-shaped but outside the operation's domain, e.g. non-finite
/// entries or a vector off the required range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Tolerances shared by every module. All must be strictly positive.
struct ToleranceConfig {
    double tol_class = 1e-9;   ///< eigen/singular value classification band
    double tol_orth = 1e-10;   ///< orthogonality residual of decompositions
    double tol_recon = 1e-10;  ///< reconstruction residual (relative to 1+‖A‖)
    double tol_pd = 1e-8;      ///< positive-definiteness margin
    double tol_range = 1e-8;   ///< range-membership residual

    /// Throws DomainError if any field is not strictly positive.
    void validate() const;

    bool operator==(const ToleranceConfig&) const = default;
};

/// A = P·diag(values)·Pᵀ with values sorted in descending order.
struct EigenFrame {
    Matrix vectors;
    Vector values;
};

/// A = R·[diag(values) 0]·Sᵀ with R (p×p), S (q×q) orthogonal, p ≤ q.
struct SvdFrame {
    Matrix left;
    Matrix right;
    Vector values;
};

bool is_finite(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol);

/// Symmetric eigendecomposition. Only the lower triangle of `a` is read.
EigenFrame eig_sym(const Matrix& a);

/// Full SVD of a p×q matrix with p ≤ q.
SvdFrame svd_full(const Matrix& a);

/// Moore–Penrose pseudoinverse; singular values ≤ tol·max(1, σ_max) are
/// treated as zero.
Matrix pinv(const Matrix& a, double tol = 1e-9);

/// Orthonormal basis (as columns) of ker(a) under the same rank cut as pinv.
Matrix null_space_basis(const Matrix& a, double tol = 1e-9);

/// Smallest eigenvalue of a symmetric matrix; +inf for an empty matrix.
double min_eigenvalue(const Matrix& a);

/// Isometric vectorization of a symmetric m×m matrix: row-major upper
/// triangle, off-diagonal entries scaled by √2.
Vector svec(const Matrix& a);
Matrix sunvec(const Vector& v);

/// Index of entry (i, j), i ≤ j, in the svec ordering of an m×m matrix.
int svec_index(int m, int i, int j);

/// Row-major vectorization of a rectangular matrix and its inverse.
Vector vec_rowmajor(const Matrix& a);
Matrix unvec_rowmajor(const Vector& v, int rows, int cols);

}  // namespace ssocert
