#include "ssocert/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssocert {

void ToleranceConfig::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string("tolerance ") + name + " must be strictly positive");
    };
    check(tol_class, "tol_class");
    check(tol_orth, "tol_orth");
    check(tol_recon, "tol_recon");
    check(tol_pd, "tol_pd");
    check(tol_range, "tol_range");
}

bool is_finite(const Matrix& a) {
    return a.allFinite();
}

bool is_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

EigenFrame eig_sym(const Matrix& a) {
    if (a.rows() != a.cols())
        throw ShapeError("eig_sym: matrix is not square");
    if (!is_finite(a))
        throw DomainError("eig_sym: non-finite entries");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success)
        throw DomainError("eig_sym: decomposition failed");

    // Eigen returns ascending order.
    const Eigen::Index m = a.rows();
    EigenFrame frame{Matrix(m, m), Vector(m)};
    for (Eigen::Index k = 0; k < m; ++k) {
        frame.values(k) = solver.eigenvalues()(m - 1 - k);
        frame.vectors.col(k) = solver.eigenvectors().col(m - 1 - k);
    }
    return frame;
}

SvdFrame svd_full(const Matrix& a) {
    if (a.rows() > a.cols())
        throw ShapeError("svd_full: expected rows <= cols, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
    if (!is_finite(a))
        throw DomainError("svd_full: non-finite entries");

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return SvdFrame{svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

Matrix pinv(const Matrix& a, double tol) {
    if (!is_finite(a))
        throw DomainError("pinv: non-finite entries");
    if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > cut) inv(k) = 1.0 / s(k);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix null_space_basis(const Matrix& a, double tol) {
    if (!is_finite(a))
        throw DomainError("null_space_basis: non-finite entries");
    const Eigen::Index n = a.cols();
    if (a.rows() == 0 || n == 0) return Matrix::Identity(n, n);

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s(0));
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

double min_eigenvalue(const Matrix& a) {
    if (a.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

int svec_index(int m, int i, int j) {
    if (i > j) std::swap(i, j);
    // rows 0..i-1 contribute m, m-1, ..., m-i+1 entries
    return i * m - i * (i - 1) / 2 + (j - i);
}

Vector svec(const Matrix& a) {
    if (a.rows() != a.cols())
        throw ShapeError("svec: matrix is not square");
    const int m = static_cast<int>(a.rows());
    const double r2 = std::sqrt(2.0);
    Vector v(m * (m + 1) / 2);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            v(k++) = (i == j) ? a(i, i) : r2 * a(i, j);
    return v;
}

Matrix sunvec(const Vector& v) {
    const auto len = v.size();
    const int m = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
    if (m * (m + 1) / 2 != len)
        throw ShapeError("sunvec: length " + std::to_string(len) + " is not triangular");
    const double r2 = std::sqrt(2.0);
    Matrix a(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double x = (i == j) ? v(k) : v(k) / r2;
            a(i, j) = x;
            a(j, i) = x;
            ++k;
        }
    return a;
}

Vector vec_rowmajor(const Matrix& a) {
    Vector v(a.size());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            v(i * a.cols() + j) = a(i, j);
    return v;
}

Matrix unvec_rowmajor(const Vector& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw ShapeError("unvec_rowmajor: length mismatch");
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            a(i, j) = v(i * cols + j);
    return a;
}

}  // namespace ssocert
