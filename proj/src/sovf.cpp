#include "ssocert/sovf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace ssocert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix symmetric_part(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

void require_symmetric_direction(const SpectralFrame& frame, const Matrix& y, const char* what) {
    frame.g.check_shape(y, what);
    if (frame.g.kind() == FunctionKind::PsdIndicator && !is_symmetric(y, 1e-10 * (1.0 + y.norm())))
        throw DomainError(std::string(what) + ": direction must be symmetric for the PSD cone");
}

double psd_gamma(const SpectralFrame& frame, const Matrix& y) {
    const Matrix yt = frame.left.transpose() * y * frame.left;
    const Vector& lam = frame.values;
    double sum = 0.0;
    for (int i : frame.upper)
        for (int j : frame.lower) sum += (lam(j) / lam(i)) * yt(i, j) * yt(i, j);
    return -2.0 * sum;
}

double nuclear_gamma(const SpectralFrame& frame, const Matrix& y) {
    const int p = frame.g.rows();
    const int q = frame.g.cols();
    const Matrix yt = frame.left.transpose() * y * frame.right;
    const Vector& s = frame.values;
    auto h = [](double t) { return std::max(t - 1.0, 0.0); };

    std::vector<int> upper_or_boundary = frame.upper;
    upper_or_boundary.insert(upper_or_boundary.end(), frame.boundary.begin(), frame.boundary.end());

    double sum = 0.0;
    for (int i : frame.upper) {
        for (int j : upper_or_boundary) {
            // pairs i < j with i ∈ α₁; a boundary j always exceeds every α₁ index
            if (j <= i) continue;
            const double skew = 0.5 * (yt(i, j) - yt(j, i));
            sum += 2.0 * ((s(i) + s(j)) / (h(s(i)) + h(s(j))) - 1.0) * skew * skew;
        }
        for (int j : frame.lower) {
            const double sym = 0.5 * (yt(i, j) + yt(j, i));
            const double skew = 0.5 * (yt(i, j) - yt(j, i));
            sum += 2.0 * ((1.0 - s(j)) / (s(i) - 1.0) * sym * sym +
                          (1.0 + s(j)) / (s(i) - 1.0) * skew * skew);
        }
        double tail = 0.0;
        for (int j = p; j < q; ++j) tail += yt(i, j) * yt(i, j);
        sum += tail / (s(i) - 1.0);
    }
    return sum;
}

}  // namespace

void CompositeProblem::validate(double sym_tol) const {
    const int dim = n();
    if (dim < 1) throw ShapeError("problem: n must be >= 1");
    if (q.rows() != dim || q.cols() != dim)
        throw ShapeError("problem: Q must be n x n");
    if (!is_finite(q) || !c.allFinite() || !std::isfinite(constant))
        throw DomainError("problem: non-finite f0 data");
    if (!is_symmetric(q, sym_tol)) throw DomainError("problem: Q is not symmetric");
    g.check_shape(a0, "problem A0");
    if (static_cast<int>(a.size()) != dim)
        throw ShapeError("problem: expected " + std::to_string(dim) + " matrices A_i, got " +
                         std::to_string(a.size()));
    const bool psd = g.kind() == FunctionKind::PsdIndicator;
    if (psd && !is_symmetric(a0, sym_tol)) throw DomainError("problem: A0 is not symmetric");
    for (int i = 0; i < dim; ++i) {
        g.check_shape(a[i], ("problem A[" + std::to_string(i) + "]").c_str());
        if (!is_finite(a[i])) throw DomainError("problem: A[" + std::to_string(i) + "] is not finite");
        if (psd && !is_symmetric(a[i], sym_tol))
            throw DomainError("problem: A[" + std::to_string(i) + "] is not symmetric");
    }
}

Matrix CompositeProblem::affine_map(const Vector& x) const {
    if (x.size() != n()) throw ShapeError("affine_map: x has wrong length");
    Matrix out = a0;
    for (int i = 0; i < n(); ++i) out += x(i) * a[i];
    return out;
}

Matrix CompositeProblem::jacobian_matrix() const {
    Matrix f(g.vector_dim(), n());
    for (int i = 0; i < n(); ++i) f.col(i) = g.vectorize(a[i]);
    return f;
}

double CompositeProblem::pd_threshold(const ToleranceConfig& tol) const {
    return tol.tol_pd * (1.0 + q.norm());
}

KktCandidate evaluate_kkt(const CompositeProblem& problem, const Vector& x, const Matrix& u,
                          const ToleranceConfig& tol) {
    problem.g.check_shape(u, "kkt candidate u");
    if (x.size() != problem.n()) throw ShapeError("kkt candidate x has wrong length");
    KktCandidate kkt{x, u};
    const Vector grad = problem.q * x + problem.c + problem.jacobian_matrix().transpose() *
                                                        problem.g.vectorize(u);
    kkt.stationarity_residual = grad.norm();
    kkt.subgradient_residual = subgradient_check(problem.g, problem.affine_map(x), u, tol).residual;
    const double bound = tol.tol_range * (1.0 + x.norm() + u.norm());
    kkt.valid = kkt.stationarity_residual <= bound && kkt.subgradient_residual <= bound;
    return kkt;
}

double gamma_closed_form(const SpectralFrame& frame, const Matrix& y, const ToleranceConfig& tol) {
    require_symmetric_direction(frame, y, "gamma_closed_form");
    const Vector yv = frame.g.vectorize(y);
    const Matrix proj = range_projector(frame, tol);
    if ((yv - proj * yv).norm() > tol.tol_range * (1.0 + y.norm())) return kInf;
    return frame.g.kind() == FunctionKind::PsdIndicator ? psd_gamma(frame, y) : nuclear_gamma(frame, y);
}

double upsilon(const SpectralFrame& frame, const Matrix& v, const ToleranceConfig& tol) {
    require_symmetric_direction(frame, v, "upsilon");
    const Matrix w = canonical_element(frame).matrix;
    const Matrix w_pinv = pinv(w, tol.tol_class);
    const Vector vv = frame.g.vectorize(v);
    if ((vv - w * (w_pinv * vv)).norm() > tol.tol_range * (1.0 + v.norm()))
        throw DomainError("upsilon: direction is outside the range of the canonical element");
    return vv.dot(w_pinv * vv - vv);
}

SsoscResult ssosc_margin(const CompositeProblem& problem, const KktCandidate& kkt,
                         const ToleranceConfig& tol) {
    if (!kkt.valid) throw DomainError("ssosc_margin: KKT candidate is not valid");
    const SpectralFrame frame = make_frame(problem.g, problem.affine_map(kkt.x), kkt.u, tol);
    const Matrix w = canonical_element(frame).matrix;
    const Matrix w_pinv = pinv(w, tol.tol_class);
    const int dim = problem.g.vector_dim();
    const Matrix id = Matrix::Identity(dim, dim);
    const Matrix fmat = problem.jacobian_matrix();

    const Matrix constraint = (id - w * w_pinv) * fmat;
    const Matrix basis = null_space_basis(constraint, tol.tol_class);

    SsoscResult result;
    result.subspace_dim = static_cast<int>(basis.cols());
    if (basis.cols() == 0) {
        result.margin = kInf;
        result.holds = true;
        return result;
    }
    const Matrix form = problem.q + fmat.transpose() * (w_pinv - id) * fmat;
    const Matrix reduced = symmetric_part(basis.transpose() * form * basis);
    result.margin = min_eigenvalue(reduced);
    result.holds = result.margin > problem.pd_threshold(tol);
    return result;
}

Matrix aug_hessian(const CompositeProblem& problem, double sigma, const ProxOperator& element) {
    const int dim = problem.g.vector_dim();
    if (element.matrix.rows() != dim || element.matrix.cols() != dim)
        throw ShapeError("aug_hessian: element dimension does not match problem");
    const Matrix fmat = problem.jacobian_matrix();
    return symmetric_part(problem.q + sigma * fmat.transpose() * element.matrix * fmat);
}

std::vector<SweepEntry> hessian_pd_sweep(const CompositeProblem& problem, const KktCandidate& kkt,
                                         const std::vector<double>& sigma_grid,
                                         const SweepOptions& options, const ToleranceConfig& tol) {
    if (!kkt.valid) throw DomainError("hessian_pd_sweep: KKT candidate is not valid");
    if (sigma_grid.empty()) throw DomainError("hessian_pd_sweep: sigma grid is empty");
    for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
        if (!(sigma_grid[k] > 0.0) || !std::isfinite(sigma_grid[k]))
            throw DomainError("hessian_pd_sweep: sigma values must be positive");
        if (k > 0 && !(sigma_grid[k] > sigma_grid[k - 1]))
            throw DomainError("hessian_pd_sweep: sigma grid must be strictly ascending");
    }

    const Matrix fx = problem.affine_map(kkt.x);
    const double threshold = problem.pd_threshold(tol);
    std::vector<SweepEntry> entries(sigma_grid.size());

    auto evaluate = [&](std::size_t k) {
        const double sigma = sigma_grid[k];
        // Each grid point owns its seed so results do not depend on scheduling.
        const std::uint64_t seed = options.seed + 0x9E3779B97F4A7C15ull * (k + 1);
        const ElementFamily family =
            conjugate_jacobian_elements(problem.g, sigma, kkt.u + sigma * fx, options.budget, seed, tol);
        double lowest = kInf;
        for (const auto& e : family.elements)
            lowest = std::min(lowest, min_eigenvalue(aug_hessian(problem, sigma, e)));
        entries[k] = SweepEntry{sigma, lowest, lowest > threshold,
                                static_cast<int>(family.elements.size()), family.exhaustive};
    };

    const int workers = std::clamp(options.threads, 1, static_cast<int>(sigma_grid.size()));
    if (workers == 1) {
        for (std::size_t k = 0; k < sigma_grid.size(); ++k) evaluate(k);
        return entries;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t k = next++; k < sigma_grid.size(); k = next++) evaluate(k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return entries;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "consistent";
        case Verdict::Inconsistent: return "inconsistent";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::vector<double> default_sigma_grid() {
    return {1.0, 10.0, 100.0, 1000.0, 10000.0};
}

Certificate certify(const CompositeProblem& problem, const KktCandidate& kkt,
                    const std::vector<double>& sigma_grid, const SweepOptions& options,
                    const ToleranceConfig& tol) {
    Certificate cert;
    cert.ssosc = ssosc_margin(problem, kkt, tol);
    cert.sweep = hessian_pd_sweep(problem, kkt, sigma_grid, options, tol);
    const bool any_pd = std::any_of(cert.sweep.begin(), cert.sweep.end(),
                                    [](const SweepEntry& e) { return e.pd; });
    cert.sampling_exhaustive = std::all_of(cert.sweep.begin(), cert.sweep.end(),
                                           [](const SweepEntry& e) { return e.exhaustive; });
    if (cert.ssosc.holds)
        cert.verdict = any_pd ? Verdict::Consistent : Verdict::Inconclusive;
    else
        cert.verdict = any_pd ? Verdict::Inconsistent : Verdict::Consistent;
    return cert;
}

}  // namespace ssocert
