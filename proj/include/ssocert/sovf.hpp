#pragma once

#include "ssocert/jacobian.hpp"

#include <cstdint>
#include <vector>

namespace ssocert {

/// min ½xᵀQx + cᵀx + const + g(A₀ + Σᵢ xᵢAᵢ).
struct CompositeProblem {
    Matrix q;
    Vector c;
    double constant = 0.0;
    Matrix a0;
    std::vector<Matrix> a;
    StructuredConvexFunction g;

    int n() const { return static_cast<int>(c.size()); }

    /// Throws ShapeError/DomainError on inconsistent data.
    void validate(double sym_tol = 1e-12) const;

    Matrix affine_map(const Vector& x) const;

    /// Columns are vectorize(Aᵢ); this is F'(x) on vectorized coordinates.
    Matrix jacobian_matrix() const;

    /// Threshold on eigenvalues used for positive-definiteness verdicts:
    /// tol_pd scaled by 1 + ‖Q‖_F.
    double pd_threshold(const ToleranceConfig& tol) const;
};

struct KktCandidate {
    Vector x;
    Matrix u;
    double stationarity_residual = 0.0;
    double subgradient_residual = 0.0;
    bool valid = false;
};

/// Fills in residuals of ∇f₀(x) + F'(x)ᵀu = 0 and u ∈ ∂g(F(x)).
KktCandidate evaluate_kkt(const CompositeProblem& problem, const Vector& x, const Matrix& u,
                          const ToleranceConfig& tol = {});

/// Γ via the closed forms for the PSD cone and the nuclear norm; +inf off
/// the range of W̄.
double gamma_closed_form(const SpectralFrame& frame, const Matrix& y, const ToleranceConfig& tol = {});

/// Υ(v) = ⟨v, (W̄† − I)v⟩. Throws DomainError if v is outside rge W̄.
double upsilon(const SpectralFrame& frame, const Matrix& v, const ToleranceConfig& tol = {});

struct SsoscResult {
    double margin = 0.0;   ///< λ_min of the reduced form; +inf when the subspace is trivial
    bool holds = false;
    int subspace_dim = 0;  ///< dim {d : F'd ∈ rge W̄}

    bool operator==(const SsoscResult&) const = default;
};

SsoscResult ssosc_margin(const CompositeProblem& problem, const KktCandidate& kkt,
                         const ToleranceConfig& tol = {});

/// Q + σ·F'ᵀUF' for an element U of J Prox_{σg*}(ū + σF(x̄)).
Matrix aug_hessian(const CompositeProblem& problem, double sigma, const ProxOperator& element);

struct SweepEntry {
    double sigma = 0.0;
    double min_eig = 0.0;
    bool pd = false;
    int elements_tested = 0;
    bool exhaustive = false;

    bool operator==(const SweepEntry&) const = default;
};

struct SweepOptions {
    int budget = 256;
    std::uint64_t seed = 0;
    int threads = 1;
};

std::vector<SweepEntry> hessian_pd_sweep(const CompositeProblem& problem, const KktCandidate& kkt,
                                         const std::vector<double>& sigma_grid,
                                         const SweepOptions& options = {},
                                         const ToleranceConfig& tol = {});

enum class Verdict { Consistent, Inconsistent, Inconclusive };

const char* to_string(Verdict v);

struct Certificate {
    SsoscResult ssosc;
    std::vector<SweepEntry> sweep;
    Verdict verdict = Verdict::Inconclusive;
    bool sampling_exhaustive = false;
};

std::vector<double> default_sigma_grid();

Certificate certify(const CompositeProblem& problem, const KktCandidate& kkt,
                    const std::vector<double>& sigma_grid, const SweepOptions& options = {},
                    const ToleranceConfig& tol = {});

}  // namespace ssocert
