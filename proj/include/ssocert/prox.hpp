#pragma once

#include "ssocert/linalg.hpp"

#include <string>
#include <vector>

namespace ssocert {

enum class FunctionKind { PsdIndicator, NuclearNorm };

std::string to_string(FunctionKind kind);

/// The convex function g of the composite problem: either the indicator of
/// the PSD cone in S^m or the nuclear norm on R^{p×q} (p ≤ q).
class StructuredConvexFunction {
public:
    static StructuredConvexFunction psd_indicator(int m);
    static StructuredConvexFunction nuclear_norm(int p, int q);

    FunctionKind kind() const { return kind_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    /// Dimension of the vectorized space (svec for PSD, row-major vec otherwise).
    int vector_dim() const;

    Vector vectorize(const Matrix& a) const;
    Matrix unvectorize(const Vector& v) const;

    /// g(a); +inf for the PSD indicator off the cone (up to tol on eigenvalues).
    double value(const Matrix& a, double tol = 1e-12) const;

    /// Throws ShapeError if `a` does not have the shape g acts on.
    void check_shape(const Matrix& a, const char* what) const;

    bool operator==(const StructuredConvexFunction&) const = default;

private:
    StructuredConvexFunction(FunctionKind kind, int rows, int cols)
        : kind_(kind), rows_(rows), cols_(cols) {}

    FunctionKind kind_;
    int rows_;
    int cols_;
};

/// Decomposition of A = x + u together with the index partition driving
/// every generalized-Jacobian formula. `upper`/`boundary`/`lower` hold
/// α/β/γ for the PSD cone (eigenvalues above/at/below 0) and α₁/α₂/α₃ for
/// the nuclear norm (singular values above/at/below 1). Indices are 0-based
/// positions in `values`.
struct SpectralFrame {
    StructuredConvexFunction g;
    Matrix point;
    Matrix left;   ///< P (PSD) or R (nuclear)
    Matrix right;  ///< P (PSD) or S (nuclear)
    Vector values; ///< descending eigenvalues or singular values
    std::vector<int> upper;
    std::vector<int> boundary;
    std::vector<int> lower;
    /// Some value sits inside the tol_class band without being exactly on
    /// the threshold, so its classification is a tolerance decision.
    bool band_active = false;

    double threshold() const;
};

struct SubgradientPair {
    Matrix x;
    Matrix u;
    double residual = 0.0;
    bool valid = false;
};

/// Prox_{σg}(w). For the PSD indicator σ is ignored.
Matrix prox_apply(const StructuredConvexFunction& g, double sigma, const Matrix& w);

/// Prox_{σg*}(w) = w − σ·Prox_{σ⁻¹g}(w/σ).
Matrix prox_conjugate_apply(const StructuredConvexFunction& g, double sigma, const Matrix& w);

/// Moreau envelope e_{σg}(w) = g(p) + ‖p − w‖²/(2σ) with p = Prox_{σg}(w).
double moreau_envelope(const StructuredConvexFunction& g, double sigma, const Matrix& w);

/// ∇e_{σg}(w) = (w − Prox_{σg}(w))/σ.
Matrix moreau_envelope_grad(const StructuredConvexFunction& g, double sigma, const Matrix& w);

/// Fixed-point test u ∈ ∂g(x) ⟺ Prox_g(x+u) = x.
SubgradientPair subgradient_check(const StructuredConvexFunction& g, const Matrix& x,
                                  const Matrix& u, const ToleranceConfig& tol = {});

/// Frame of A = x + u after validating the subgradient pair.
SpectralFrame make_frame(const StructuredConvexFunction& g, const Matrix& x, const Matrix& u,
                         const ToleranceConfig& tol = {});

/// Frame of an arbitrary point A (no subgradient check).
SpectralFrame frame_at(const StructuredConvexFunction& g, const Matrix& a,
                       const ToleranceConfig& tol = {});

/// Frame built from a caller-supplied decomposition. Used to compare
/// results across different orthonormal bases of repeated eigenvalues.
SpectralFrame frame_from_eigen(const StructuredConvexFunction& g, const Matrix& a,
                               const EigenFrame& eig, const ToleranceConfig& tol = {});
SpectralFrame frame_from_svd(const StructuredConvexFunction& g, const Matrix& a,
                             const SvdFrame& svd, const ToleranceConfig& tol = {});

/// Frame of the generalized Jacobian of Prox_{t·g} at z. Prox_{t‖·‖*}(z) =
/// t·Prox_{‖·‖*}(z/t), so the nuclear frame is taken at z/t; the PSD
/// projection is scale-free.
SpectralFrame scaled_frame(const StructuredConvexFunction& g, double t, const Matrix& z,
                           const ToleranceConfig& tol = {});

}  // namespace ssocert
