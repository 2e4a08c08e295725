#include "ssocert/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace ssocert {

namespace {

enum class Cell { Upper, Boundary, Lower };

std::vector<Cell> cells_of(const SpectralFrame& frame) {
    std::vector<Cell> cells(frame.values.size(), Cell::Upper);
    for (int i : frame.boundary) cells[i] = Cell::Boundary;
    for (int i : frame.lower) cells[i] = Cell::Lower;
    return cells;
}

// Position of each boundary index inside `frame.boundary` (-1 elsewhere).
std::vector<int> boundary_positions(const SpectralFrame& frame) {
    std::vector<int> pos(frame.values.size(), -1);
    for (std::size_t k = 0; k < frame.boundary.size(); ++k) pos[frame.boundary[k]] = static_cast<int>(k);
    return pos;
}

// Hadamard multipliers of the PSD element in the eigenbasis of A.
Matrix psd_multipliers(const SpectralFrame& frame, const PsdChoice& choice) {
    const int m = static_cast<int>(frame.values.size());
    const auto cells = cells_of(frame);
    const auto bpos = boundary_positions(frame);

    // Rank of each β index within β₊ or β₋.
    std::vector<int> rank(frame.boundary.size());
    int plus = 0, minus = 0;
    for (std::size_t k = 0; k < frame.boundary.size(); ++k)
        rank[k] = choice.minus[k] ? minus++ : plus++;

    const Vector& lam = frame.values;
    Matrix c = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Cell ci = cells[i], cj = cells[j];
            double v = 0.0;
            if (ci == Cell::Lower || cj == Cell::Lower) {
                if (ci == Cell::Upper || cj == Cell::Upper) {
                    // α×γ: both denominators strictly positive, no 0/0 case
                    v = (std::max(lam(i), 0.0) + std::max(lam(j), 0.0)) /
                        (std::abs(lam(i)) + std::abs(lam(j)));
                }
            } else if (ci == Cell::Upper || cj == Cell::Upper) {
                v = 1.0;
            } else {
                const int bi = bpos[i], bj = bpos[j];
                const bool mi = choice.minus[bi], mj = choice.minus[bj];
                if (!mi && !mj) {
                    v = 1.0;
                } else if (!mi && mj) {
                    v = choice.tau(rank[bi], rank[bj]);
                } else if (mi && !mj) {
                    v = choice.tau(rank[bj], rank[bi]);
                }
            }
            c(i, j) = v;
        }
    }
    return c;
}

double shrink(double t) {
    return std::max(t - 1.0, 0.0);
}

struct NuclearMultipliers {
    Matrix sym;   // Ω^α
    Matrix skew;  // Ω^γ
    Matrix tail;  // Ω^β
};

NuclearMultipliers nuclear_multipliers(const SpectralFrame& frame, const NuclearChoice& choice) {
    const int p = frame.g.rows();
    const int q = frame.g.cols();
    const auto cells = cells_of(frame);
    const auto bpos = boundary_positions(frame);
    const Vector& s = frame.values;

    NuclearMultipliers out{Matrix::Zero(p, p), Matrix::Zero(p, p), Matrix::Zero(p, q - p)};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const Cell ci = cells[i], cj = cells[j];
            if (ci == Cell::Upper || cj == Cell::Upper) {
                out.skew(i, j) = (shrink(s(i)) + shrink(s(j))) / (s(i) + s(j));
                if (ci == Cell::Lower) {
                    out.sym(i, j) = (s(j) - 1.0) / (s(j) - s(i));
                } else if (cj == Cell::Lower) {
                    out.sym(i, j) = (s(i) - 1.0) / (s(i) - s(j));
                } else {
                    out.sym(i, j) = 1.0;
                }
            } else if (ci == Cell::Boundary && cj == Cell::Boundary) {
                out.sym(i, j) = choice.omega(bpos[i], bpos[j]);
            }
        }
        if (cells[i] == Cell::Upper)
            out.tail.row(i).setConstant((s(i) - 1.0) / s(i));
    }
    return out;
}

Matrix apply_psd(const SpectralFrame& frame, const Matrix& multipliers, const Matrix& d) {
    const Matrix& p = frame.left;
    const Matrix dt = p.transpose() * d * p;
    const Matrix vt = multipliers.cwiseProduct(dt);
    return p * vt * p.transpose();
}

Matrix apply_nuclear(const SpectralFrame& frame, const NuclearMultipliers& om, const Matrix& d) {
    const int p = frame.g.rows();
    const int q = frame.g.cols();
    const Matrix& r = frame.left;
    const auto s1 = frame.right.leftCols(p);
    const auto s2 = frame.right.rightCols(q - p);
    const Matrix d1 = r.transpose() * d * s1;
    const Matrix d1s = 0.5 * (d1 + d1.transpose());
    const Matrix d1a = 0.5 * (d1 - d1.transpose());
    Matrix inner = (om.sym.cwiseProduct(d1s) + om.skew.cwiseProduct(d1a)) * s1.transpose();
    if (q > p) {
        const Matrix d2 = r.transpose() * d * s2;
        inner += om.tail.cwiseProduct(d2) * s2.transpose();
    }
    return r * inner;
}

// Applies the element to each coordinate basis vector.
Matrix materialize_matrix(const SpectralFrame& frame, const JacobianChoice& choice) {
    const auto& g = frame.g;
    const int n = g.vector_dim();
    if (n > kMaxOperatorDim)
        throw ShapeError("operator dimension " + std::to_string(n) + " exceeds cap " +
                         std::to_string(kMaxOperatorDim));
    Matrix out(n, n);
    if (g.kind() == FunctionKind::PsdIndicator) {
        const Matrix mult = psd_multipliers(frame, std::get<PsdChoice>(choice));
        for (int k = 0; k < n; ++k)
            out.col(k) = svec(apply_psd(frame, mult, sunvec(Vector::Unit(n, k))));
    } else {
        const auto om = nuclear_multipliers(frame, std::get<NuclearChoice>(choice));
        for (int k = 0; k < n; ++k)
            out.col(k) = vec_rowmajor(
                apply_nuclear(frame, om, unvec_rowmajor(Vector::Unit(n, k), g.rows(), g.cols())));
    }
    return out;
}

std::uint64_t next_bits(std::mt19937_64& rng) {
    return rng();
}

struct PatternKey {
    std::vector<bool> bits;
    bool operator<(const PatternKey& o) const { return bits < o.bits; }
};

PsdChoice psd_choice_from_bits(std::size_t nb, std::uint64_t mask, const std::vector<bool>& tau_bits) {
    PsdChoice c;
    c.minus.resize(nb);
    int nminus = 0;
    for (std::size_t k = 0; k < nb; ++k) {
        c.minus[k] = (mask >> k) & 1u;
        nminus += c.minus[k];
    }
    const int nplus = static_cast<int>(nb) - nminus;
    c.tau = Matrix::Zero(nplus, nminus);
    for (int a = 0; a < nplus; ++a)
        for (int b = 0; b < nminus; ++b)
            c.tau(a, b) = tau_bits[a * nminus + b] ? 1.0 : 0.0;
    return c;
}

NuclearChoice nuclear_choice_from_bits(std::size_t k, const std::vector<bool>& bits) {
    NuclearChoice c{Matrix::Zero(k, k)};
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            const double v = bits[idx++] ? 1.0 : 0.0;
            c.omega(i, j) = v;
            c.omega(j, i) = v;
        }
    return c;
}

}  // namespace

JacobianChoice canonical_choice(const SpectralFrame& frame) {
    const std::size_t nb = frame.boundary.size();
    if (frame.g.kind() == FunctionKind::PsdIndicator)
        return PsdChoice{std::vector<bool>(nb, false), Matrix::Zero(static_cast<Eigen::Index>(nb), 0)};
    return NuclearChoice{Matrix::Ones(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb))};
}

void validate_choice(const SpectralFrame& frame, const JacobianChoice& choice) {
    const auto nb = static_cast<Eigen::Index>(frame.boundary.size());
    if (frame.g.kind() == FunctionKind::PsdIndicator) {
        const auto* c = std::get_if<PsdChoice>(&choice);
        if (c == nullptr) throw ShapeError("PSD frame needs a PsdChoice");
        if (static_cast<Eigen::Index>(c->minus.size()) != nb)
            throw ShapeError("PsdChoice: sub-partition size differs from |beta|");
        const auto nminus = std::count(c->minus.begin(), c->minus.end(), true);
        if (c->tau.rows() != nb - nminus || c->tau.cols() != nminus)
            throw ShapeError("PsdChoice: tau must be |beta+| x |beta-|");
        if (c->tau.size() > 0 && (c->tau.minCoeff() < 0.0 || c->tau.maxCoeff() > 1.0))
            throw DomainError("PsdChoice: tau entries must lie in [0,1]");
    } else {
        const auto* c = std::get_if<NuclearChoice>(&choice);
        if (c == nullptr) throw ShapeError("nuclear frame needs a NuclearChoice");
        if (c->omega.rows() != nb || c->omega.cols() != nb)
            throw ShapeError("NuclearChoice: omega must be |alpha2| x |alpha2|");
        if (nb > 0) {
            if (c->omega.minCoeff() < 0.0 || c->omega.maxCoeff() > 1.0)
                throw DomainError("NuclearChoice: omega entries must lie in [0,1]");
            if (!is_symmetric(c->omega, 0.0))
                throw DomainError("NuclearChoice: omega must be symmetric");
        }
    }
}

Matrix jacobian_apply(const SpectralFrame& frame, const JacobianChoice& choice, const Matrix& d) {
    frame.g.check_shape(d, "jacobian_apply");
    validate_choice(frame, choice);
    if (frame.g.kind() == FunctionKind::PsdIndicator)
        return apply_psd(frame, psd_multipliers(frame, std::get<PsdChoice>(choice)), d);
    return apply_nuclear(frame, nuclear_multipliers(frame, std::get<NuclearChoice>(choice)), d);
}

ProxOperator materialize(std::shared_ptr<const SpectralFrame> frame, const JacobianChoice& choice) {
    validate_choice(*frame, choice);
    Matrix m = materialize_matrix(*frame, choice);
    return ProxOperator{std::move(frame), choice, std::move(m), false};
}

ProxOperator canonical_element(const SpectralFrame& frame) {
    return materialize(std::make_shared<const SpectralFrame>(frame), canonical_choice(frame));
}

Matrix range_projector(const SpectralFrame& frame, const ToleranceConfig& tol) {
    const Matrix w = canonical_element(frame).matrix;
    return w * pinv(w, tol.tol_class);
}

ElementFamily sample_limiting_elements(const SpectralFrame& frame, int budget, std::uint64_t seed) {
    if (budget < 1) throw DomainError("sample_limiting_elements: budget must be >= 1");
    auto shared = std::make_shared<const SpectralFrame>(frame);
    ElementFamily family;
    family.elements.push_back(materialize(shared, canonical_choice(frame)));

    const std::size_t nb = frame.boundary.size();
    std::mt19937_64 rng(seed);

    if (frame.g.kind() == FunctionKind::PsdIndicator) {
        // Pattern space: every sub-partition mask and every τ bit pattern on β₊×β₋.
        double total = 0.0;
        for (std::size_t k = 0; k <= nb; ++k) {
            const double binom = std::tgamma(nb + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(nb - k + 1.0));
            total += binom * std::pow(2.0, static_cast<double>(k * (nb - k)));
        }
        family.pattern_count = total;
        if (nb < 63 && total <= budget) {
            family.exhaustive = true;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
                const int nminus = __builtin_popcountll(mask);
                const std::size_t ntau = static_cast<std::size_t>(nminus) * (nb - nminus);
                for (std::uint64_t t = 0; t < (std::uint64_t{1} << ntau); ++t) {
                    if (mask == 0) break;  // canonical, already present
                    std::vector<bool> bits(ntau);
                    for (std::size_t b = 0; b < ntau; ++b) bits[b] = (t >> b) & 1u;
                    family.elements.push_back(materialize(shared, psd_choice_from_bits(nb, mask, bits)));
                }
            }
            return family;
        }
        std::set<PatternKey> seen;
        PatternKey canon{std::vector<bool>(nb, false)};
        seen.insert(canon);
        const int max_attempts = 20 * budget;
        for (int attempt = 0; attempt < max_attempts && static_cast<int>(family.elements.size()) < budget;
             ++attempt) {
            PsdChoice c;
            c.minus.resize(nb);
            int nminus = 0;
            for (std::size_t k = 0; k < nb; ++k) {
                c.minus[k] = next_bits(rng) & 1u;
                nminus += c.minus[k];
            }
            const int nplus = static_cast<int>(nb) - nminus;
            c.tau = Matrix::Zero(nplus, nminus);
            PatternKey key{c.minus};
            for (int a = 0; a < nplus; ++a)
                for (int b = 0; b < nminus; ++b) {
                    const bool bit = next_bits(rng) & 1u;
                    c.tau(a, b) = bit ? 1.0 : 0.0;
                    key.bits.push_back(bit);
                }
            if (!seen.insert(key).second) continue;
            family.elements.push_back(materialize(shared, c));
        }
        return family;
    }

    const std::size_t nbits = nb * (nb + 1) / 2;
    family.pattern_count = std::pow(2.0, static_cast<double>(nbits));
    if (nbits < 63 && family.pattern_count <= budget) {
        family.exhaustive = true;
        const std::uint64_t all = (std::uint64_t{1} << nbits) - 1;
        // Enumerate complements so that the all-ones (canonical) pattern comes first.
        for (std::uint64_t t = 1; t <= all; ++t) {
            const std::uint64_t pattern = all ^ t;
            std::vector<bool> bits(nbits);
            for (std::size_t b = 0; b < nbits; ++b) bits[b] = (pattern >> b) & 1u;
            family.elements.push_back(materialize(shared, nuclear_choice_from_bits(nb, bits)));
        }
        return family;
    }
    std::set<PatternKey> seen;
    seen.insert(PatternKey{std::vector<bool>(nbits, true)});
    const int max_attempts = 20 * budget;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(family.elements.size()) < budget;
         ++attempt) {
        PatternKey key{std::vector<bool>(nbits)};
        for (std::size_t b = 0; b < nbits; ++b) key.bits[b] = next_bits(rng) & 1u;
        if (!seen.insert(key).second) continue;
        family.elements.push_back(materialize(shared, nuclear_choice_from_bits(nb, key.bits)));
    }
    return family;
}

ElementFamily conjugate_jacobian_elements(const StructuredConvexFunction& g, double sigma,
                                          const Matrix& w, int budget, std::uint64_t seed,
                                          const ToleranceConfig& tol) {
    const double inv = 1.0 / sigma;
    const SpectralFrame frame = scaled_frame(g, inv, w * inv, tol);
    ElementFamily family = sample_limiting_elements(frame, budget, seed);
    const int n = g.vector_dim();
    for (auto& e : family.elements) {
        e.matrix = Matrix::Identity(n, n) - e.matrix;
        e.conjugate = true;
    }
    return family;
}

}  // namespace ssocert
