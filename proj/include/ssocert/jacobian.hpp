#pragma once

#include "ssocert/prox.hpp"

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace ssocert {

/// Choice operator Z on the β×β block of a PSD frame, written in the
/// eigenbasis of A. β is split into β₊ (minus[k] == false) and β₋; then
/// Z(D)_{β₊β₊} = D_{β₊β₊}, Z(D)_{β₊β₋} = τ∘D_{β₊β₋}, Z(D)_{β₋β₋} = 0.
/// `tau` is |β₊|×|β₋| with rows/columns in increasing β order.
struct PsdChoice {
    std::vector<bool> minus;
    Matrix tau;
};

/// Symmetric Ω^α values on the α₂×α₂ block of a nuclear frame.
struct NuclearChoice {
    Matrix omega;
};

using JacobianChoice = std::variant<PsdChoice, NuclearChoice>;

/// τ ≡ 1 with β₋ = ∅ (PSD), Ω^α ≡ 1 on α₂×α₂ (nuclear).
JacobianChoice canonical_choice(const SpectralFrame& frame);

/// Throws ShapeError/DomainError when the choice does not fit the frame or
/// leaves [0,1].
void validate_choice(const SpectralFrame& frame, const JacobianChoice& choice);

/// Applies the generalized-Jacobian element selected by `choice` to D.
Matrix jacobian_apply(const SpectralFrame& frame, const JacobianChoice& choice, const Matrix& d);

/// Largest svec/vec dimension for which operators are materialized.
inline constexpr int kMaxOperatorDim = 4096;

/// A generalized-Jacobian element materialized on svec (PSD) or row-major
/// vec (nuclear) coordinates. For elements of J Prox_{σg*} produced through
/// the Moreau identity, `matrix` holds I − W and `conjugate` is set.
struct ProxOperator {
    std::shared_ptr<const SpectralFrame> frame;
    JacobianChoice choice;
    Matrix matrix;
    bool conjugate = false;
};

ProxOperator materialize(std::shared_ptr<const SpectralFrame> frame, const JacobianChoice& choice);

/// The element W̄ whose range contains the range of every element.
ProxOperator canonical_element(const SpectralFrame& frame);

/// W̄W̄†, the orthogonal projector onto rge W̄.
Matrix range_projector(const SpectralFrame& frame, const ToleranceConfig& tol = {});

struct ElementFamily {
    std::vector<ProxOperator> elements;  ///< canonical element first
    bool exhaustive = false;             ///< every choice pattern was enumerated
    double pattern_count = 0.0;          ///< size of the pattern space
};

/// Limiting elements: β sub-partitions with τ ∈ {0,1} patterns (PSD) or
/// symmetric {0,1} patterns on α₂×α₂ (nuclear). Enumerates everything when
/// the pattern space fits the budget, otherwise draws a seeded sample.
ElementFamily sample_limiting_elements(const SpectralFrame& frame, int budget,
                                       std::uint64_t seed = 0);

/// Elements I − W of J Prox_{σg*}(w), with W drawn from the limiting
/// elements of J Prox_{σ⁻¹g}(w/σ).
ElementFamily conjugate_jacobian_elements(const StructuredConvexFunction& g, double sigma,
                                          const Matrix& w, int budget, std::uint64_t seed = 0,
                                          const ToleranceConfig& tol = {});

}  // namespace ssocert
