#pragma once

#include "ssocert/random.hpp"
#include "ssocert/sovf.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ssocert {

/// Outcome of comparing a closed form against an independent oracle.
struct OracleReport {
    std::string quantity;
    double closed_form = 0.0;
    double oracle = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// Preconditions of the oracle do not hold (e.g. a non-differentiable
    /// point); the comparison was not attempted.
    bool flagged = false;
    std::string detail;

    bool operator==(const OracleReport&) const = default;
};

/// Central differences of Prox_g against the canonical Jacobian element.
/// Passes when the best relative gap over `t_grid` is ≤ 1e-5.
OracleReport fd_prox_jacobian(const StructuredConvexFunction& g, const Matrix& w, const Matrix& d,
                              const std::vector<double>& t_grid = {1e-4, 1e-5, 1e-6},
                              const ToleranceConfig& tol = {});

/// Second-order difference quotient of the nuclear norm at (x, u) along d,
/// extrapolated to t → 0 and compared with Γ. The fixed-direction quotient
/// equals the second-order subderivative only when the direction does not
/// couple the zero-singular-value rows of x back into its range; for other
/// directions it is an upper bound.
OracleReport delta2_quotient(const StructuredConvexFunction& g, const Matrix& x, const Matrix& u,
                             const Matrix& d,
                             const std::vector<double>& t_grid = {1e-2, 1e-3, 1e-4},
                             const ToleranceConfig& tol = {});

/// Largest svec/vec dimension accepted by the brute-force SOVF oracle.
inline constexpr int kBruteForceMaxDim = 36;

/// min ⟨Y, W†Y − Y⟩ over a family of generalized-Jacobian elements that
/// admit Y in their range. The family holds the sampled limiting elements
/// plus seeded convex combinations of them, `budget` elements in total.
class GammaBruteForce {
public:
    GammaBruteForce(const SpectralFrame& frame, int budget, std::uint64_t seed = 0,
                    const ToleranceConfig& tol = {});

    double operator()(const Matrix& y) const;

    bool exhaustive() const { return exhaustive_; }
    std::size_t size() const { return pinvs_.size(); }

private:
    StructuredConvexFunction g_;
    ToleranceConfig tol_;
    std::vector<Matrix> projectors_;
    std::vector<Matrix> pinvs_;
    bool exhaustive_ = false;
};

double gamma_bruteforce(const SpectralFrame& frame, const Matrix& y, int budget,
                        std::uint64_t seed = 0, const ToleranceConfig& tol = {});

/// Checks ‖z‖² ≥ ‖(I−UU†)d‖² ≥ ‖(I−W̄W̄†)d‖² for z = (I+(σ−1)U)⁻¹(I−U)d and
/// the decay of ‖σ(I+(σ−1)U)⁻¹Ud − UU†d‖ over σ = 10, …, 10⁶ on random d
/// and sampled U ∈ J Prox_g.
OracleReport coderivative_chain_check(const SpectralFrame& frame,
                                      const std::vector<double>& sigma_list, int trials,
                                      std::uint64_t seed = 0, const ToleranceConfig& tol = {});

/// Single-matrix version of the chain check used by the scalar fixtures.
OracleReport coderivative_chain_check(const Matrix& u, const Matrix& w_bar, const Vector& d,
                                      double sigma, const ToleranceConfig& tol = {});

// ---- random instances -----------------------------------------------------

/// Sign class of an eigenvalue (PSD) or position of a singular value
/// relative to 1 (nuclear), encoded as the sign of value − threshold.
using SignPattern = std::vector<int>;

/// A = P·diag(λ)·Pᵀ with λ of the requested signs, |λ| ∈ [0.5, 3], and a
/// Haar-random P.
Matrix random_psd_point(Rng& rng, const SignPattern& signs);

/// A = R·[diag(σ) 0]·Sᵀ; classes above 1 draw from [1.5, 4] and classes
/// below 1 from [0, 0.6].
Matrix random_nuclear_point(Rng& rng, int p, int q, const SignPattern& classes);

/// Splits A into x = Prox_g(A) and u = A − x, a valid subgradient pair.
SubgradientPair split_point(const StructuredConvexFunction& g, const Matrix& a);

// ---- self-test ------------------------------------------------------------

struct SelftestOptions {
    int trials = 100;
    std::uint64_t seed = 7;
};

/// Runs every oracle suite and returns one report per suite.
std::vector<OracleReport> run_selftest(const SelftestOptions& options = {},
                                       const ToleranceConfig& tol = {});

}  // namespace ssocert
