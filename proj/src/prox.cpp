#include "ssocert/prox.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <limits>

namespace ssocert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Symmetric inputs are required for the PSD cone; tiny asymmetry from
// floating-point arithmetic is averaged away.
Matrix symmetrized(const Matrix& w, const char* what) {
    const double scale = 1.0 + w.norm();
    if (!is_symmetric(w, 1e-8 * scale))
        throw DomainError(std::string(what) + ": matrix is not symmetric");
    return 0.5 * (w + w.transpose());
}

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("sigma must be positive and finite");
}

void classify(SpectralFrame& frame, double tol) {
    const double threshold = frame.threshold();
    for (int i = 0; i < frame.values.size(); ++i) {
        const double gap = frame.values(i) - threshold;
        if (gap > tol) {
            frame.upper.push_back(i);
        } else if (gap < -tol) {
            frame.lower.push_back(i);
        } else {
            frame.boundary.push_back(i);
            if (gap != 0.0) frame.band_active = true;
        }
    }
}

}  // namespace

std::string to_string(FunctionKind kind) {
    return kind == FunctionKind::PsdIndicator ? "psd_indicator" : "nuclear_norm";
}

StructuredConvexFunction StructuredConvexFunction::psd_indicator(int m) {
    if (m < 1) throw ShapeError("psd_indicator: m must be >= 1");
    return {FunctionKind::PsdIndicator, m, m};
}

StructuredConvexFunction StructuredConvexFunction::nuclear_norm(int p, int q) {
    if (p < 1 || p > q) throw ShapeError("nuclear_norm: need 1 <= p <= q");
    return {FunctionKind::NuclearNorm, p, q};
}

int StructuredConvexFunction::vector_dim() const {
    return kind_ == FunctionKind::PsdIndicator ? rows_ * (rows_ + 1) / 2 : rows_ * cols_;
}

Vector StructuredConvexFunction::vectorize(const Matrix& a) const {
    check_shape(a, "vectorize");
    return kind_ == FunctionKind::PsdIndicator ? svec(a) : vec_rowmajor(a);
}

Matrix StructuredConvexFunction::unvectorize(const Vector& v) const {
    if (v.size() != vector_dim())
        throw ShapeError("unvectorize: expected length " + std::to_string(vector_dim()));
    return kind_ == FunctionKind::PsdIndicator ? sunvec(v) : unvec_rowmajor(v, rows_, cols_);
}

void StructuredConvexFunction::check_shape(const Matrix& a, const char* what) const {
    if (a.rows() != rows_ || a.cols() != cols_)
        throw ShapeError(std::string(what) + ": expected " + std::to_string(rows_) + "x" +
                         std::to_string(cols_) + " matrix, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
}

double StructuredConvexFunction::value(const Matrix& a, double tol) const {
    check_shape(a, "value");
    if (kind_ == FunctionKind::PsdIndicator) {
        const EigenFrame eig = eig_sym(symmetrized(a, "value"));
        return eig.values(rows_ - 1) >= -tol * (1.0 + a.norm()) ? 0.0 : kInf;
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double SpectralFrame::threshold() const {
    return g.kind() == FunctionKind::PsdIndicator ? 0.0 : 1.0;
}

Matrix prox_apply(const StructuredConvexFunction& g, double sigma, const Matrix& w) {
    check_sigma(sigma);
    g.check_shape(w, "prox_apply");
    if (g.kind() == FunctionKind::PsdIndicator) {
        const EigenFrame eig = eig_sym(symmetrized(w, "prox_apply"));
        const Vector clipped = eig.values.cwiseMax(0.0);
        Matrix out = eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
        return 0.5 * (out + out.transpose());
    }
    const SvdFrame svd = svd_full(w);
    const int p = g.rows();
    const Vector shrunk = (svd.values.array() - sigma).cwiseMax(0.0);
    return svd.left * shrunk.asDiagonal() * svd.right.leftCols(p).transpose();
}

Matrix prox_conjugate_apply(const StructuredConvexFunction& g, double sigma, const Matrix& w) {
    check_sigma(sigma);
    return w - sigma * prox_apply(g, 1.0 / sigma, w / sigma);
}

double moreau_envelope(const StructuredConvexFunction& g, double sigma, const Matrix& w) {
    const Matrix p = prox_apply(g, sigma, w);
    const double gp = g.kind() == FunctionKind::PsdIndicator ? 0.0 : g.value(p);
    return gp + (p - w).squaredNorm() / (2.0 * sigma);
}

Matrix moreau_envelope_grad(const StructuredConvexFunction& g, double sigma, const Matrix& w) {
    return (w - prox_apply(g, sigma, w)) / sigma;
}

SubgradientPair subgradient_check(const StructuredConvexFunction& g, const Matrix& x,
                                  const Matrix& u, const ToleranceConfig& tol) {
    g.check_shape(x, "subgradient_check(x)");
    g.check_shape(u, "subgradient_check(u)");
    SubgradientPair pair{x, u};
    pair.residual = (prox_apply(g, 1.0, x + u) - x).norm();
    pair.valid = pair.residual <= tol.tol_range * (1.0 + x.norm());
    return pair;
}

SpectralFrame frame_from_eigen(const StructuredConvexFunction& g, const Matrix& a,
                               const EigenFrame& eig, const ToleranceConfig& tol) {
    if (g.kind() != FunctionKind::PsdIndicator)
        throw DomainError("frame_from_eigen: function is not the PSD indicator");
    g.check_shape(a, "frame_from_eigen");
    const int m = g.rows();
    if (eig.vectors.rows() != m || eig.vectors.cols() != m || eig.values.size() != m)
        throw ShapeError("frame_from_eigen: decomposition has wrong dimensions");
    const Matrix id = Matrix::Identity(m, m);
    if ((eig.vectors.transpose() * eig.vectors - id).norm() > tol.tol_orth)
        throw DomainError("frame_from_eigen: eigenvectors are not orthonormal");
    const Matrix recon = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    if ((recon - a).norm() > tol.tol_recon * (1.0 + a.norm()))
        throw DomainError("frame_from_eigen: decomposition does not reconstruct A");
    for (int i = 1; i < m; ++i)
        if (eig.values(i) > eig.values(i - 1))
            throw DomainError("frame_from_eigen: eigenvalues not in descending order");

    SpectralFrame frame{g, a, eig.vectors, eig.vectors, eig.values};
    classify(frame, tol.tol_class);
    return frame;
}

SpectralFrame frame_from_svd(const StructuredConvexFunction& g, const Matrix& a,
                             const SvdFrame& svd, const ToleranceConfig& tol) {
    if (g.kind() != FunctionKind::NuclearNorm)
        throw DomainError("frame_from_svd: function is not the nuclear norm");
    g.check_shape(a, "frame_from_svd");
    const int p = g.rows();
    const int q = g.cols();
    if (svd.left.rows() != p || svd.left.cols() != p || svd.right.rows() != q ||
        svd.right.cols() != q || svd.values.size() != p)
        throw ShapeError("frame_from_svd: decomposition has wrong dimensions");
    if ((svd.left.transpose() * svd.left - Matrix::Identity(p, p)).norm() > tol.tol_orth ||
        (svd.right.transpose() * svd.right - Matrix::Identity(q, q)).norm() > tol.tol_orth)
        throw DomainError("frame_from_svd: singular vectors are not orthonormal");
    const Matrix recon = svd.left * svd.values.asDiagonal() * svd.right.leftCols(p).transpose();
    if ((recon - a).norm() > tol.tol_recon * (1.0 + a.norm()))
        throw DomainError("frame_from_svd: decomposition does not reconstruct A");
    for (int i = 0; i < p; ++i)
        if (svd.values(i) < 0.0 || (i > 0 && svd.values(i) > svd.values(i - 1)))
            throw DomainError("frame_from_svd: singular values not descending and nonnegative");

    SpectralFrame frame{g, a, svd.left, svd.right, svd.values};
    classify(frame, tol.tol_class);
    return frame;
}

SpectralFrame frame_at(const StructuredConvexFunction& g, const Matrix& a,
                       const ToleranceConfig& tol) {
    g.check_shape(a, "frame_at");
    if (g.kind() == FunctionKind::PsdIndicator) {
        const Matrix sym = symmetrized(a, "frame_at");
        return frame_from_eigen(g, sym, eig_sym(sym), tol);
    }
    return frame_from_svd(g, a, svd_full(a), tol);
}

SpectralFrame make_frame(const StructuredConvexFunction& g, const Matrix& x, const Matrix& u,
                         const ToleranceConfig& tol) {
    const SubgradientPair pair = subgradient_check(g, x, u, tol);
    if (!pair.valid)
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.3e", pair.residual);
        throw DomainError(std::string("make_frame: u is not a subgradient of g at x (prox residual ") +
                          buf + ")");
    }
    return frame_at(g, x + u, tol);
}

SpectralFrame scaled_frame(const StructuredConvexFunction& g, double t, const Matrix& z,
                           const ToleranceConfig& tol) {
    check_sigma(t);
    if (g.kind() == FunctionKind::PsdIndicator) return frame_at(g, z, tol);
    return frame_at(g, z / t, tol);
}

}  // namespace ssocert
