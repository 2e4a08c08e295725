#include "ssocert/oracles.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ssocert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format(const char* fmt, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

Matrix sorted_diag_point(const Matrix& left, const Matrix& right, Vector values, int rows, int cols) {
    std::sort(values.begin(), values.end(), std::greater<>());
    Matrix core = Matrix::Zero(rows, cols);
    for (int i = 0; i < values.size(); ++i) core(i, i) = values(i);
    return left * core * right.transpose();
}

}  // namespace

OracleReport fd_prox_jacobian(const StructuredConvexFunction& g, const Matrix& w, const Matrix& d,
                              const std::vector<double>& t_grid, const ToleranceConfig& tol) {
    OracleReport report{"fd_prox_jacobian"};
    report.tolerance = 1e-5;
    const SpectralFrame frame = frame_at(g, w, tol);
    if (!frame.boundary.empty()) {
        report.flagged = true;
        report.detail = "point is not a differentiability point of the prox";
        return report;
    }
    if (t_grid.empty()) throw DomainError("fd_prox_jacobian: empty step grid");

    const Matrix jd = jacobian_apply(frame, canonical_choice(frame), d);
    const double scale = std::max(jd.norm(), 1e-8 * d.norm());
    report.closed_form = jd.norm();
    report.abs_gap = kInf;
    for (double t : t_grid) {
        const Matrix fd = (prox_apply(g, 1.0, w + t * d) - prox_apply(g, 1.0, w - t * d)) / (2.0 * t);
        const double gap = (fd - jd).norm();
        if (gap < report.abs_gap) {
            report.abs_gap = gap;
            report.oracle = fd.norm();
        }
    }
    report.rel_gap = scale > 0.0 ? report.abs_gap / scale : 0.0;
    report.pass = report.rel_gap <= report.tolerance;
    return report;
}

OracleReport delta2_quotient(const StructuredConvexFunction& g, const Matrix& x, const Matrix& u,
                             const Matrix& d, const std::vector<double>& t_grid,
                             const ToleranceConfig& tol) {
    if (g.kind() != FunctionKind::NuclearNorm)
        throw DomainError("delta2_quotient: only defined here for the nuclear norm");
    if (t_grid.size() < 2) throw DomainError("delta2_quotient: need at least two step sizes");
    g.check_shape(d, "delta2_quotient");

    OracleReport report{"delta2_quotient"};
    report.tolerance = 1e-2;
    const SpectralFrame frame = make_frame(g, x, u, tol);
    if (!frame.boundary.empty()) {
        report.flagged = true;
        report.detail = "frame has singular values equal to 1";
        return report;
    }

    const double base = g.value(x);
    const double slope = u.cwiseProduct(d).sum();
    auto quotient = [&](double t) {
        return (g.value(x + t * d) - base - t * slope) / (0.5 * t * t);
    };
    // The quotient is affine in t to leading order; extrapolate linearly from
    // the two largest steps, which carry the least cancellation error.
    std::vector<double> steps = t_grid;
    std::sort(steps.begin(), steps.end(), std::greater<>());
    const double t1 = steps[0], t2 = steps[1];
    const double q1 = quotient(t1), q2 = quotient(t2);
    const double limit = (t1 * q2 - t2 * q1) / (t1 - t2);

    report.closed_form = gamma_closed_form(frame, d, tol);
    report.oracle = limit;
    report.abs_gap = std::abs(limit - report.closed_form);
    // Γ vanishes along smooth directions; measure those against ‖d‖².
    report.rel_gap = report.abs_gap / std::max(std::abs(report.closed_form), 1e-4 * d.squaredNorm());
    report.pass = std::isfinite(report.closed_form) && report.rel_gap <= report.tolerance;
    if (!std::isfinite(report.closed_form)) report.detail = "direction lies outside the range";
    return report;
}

GammaBruteForce::GammaBruteForce(const SpectralFrame& frame, int budget, std::uint64_t seed,
                                 const ToleranceConfig& tol)
    : g_(frame.g), tol_(tol) {
    if (frame.g.vector_dim() > kBruteForceMaxDim)
        throw ShapeError("gamma_bruteforce: dimension " + std::to_string(frame.g.vector_dim()) +
                         " exceeds " + std::to_string(kBruteForceMaxDim));
    const ElementFamily family = sample_limiting_elements(frame, budget, seed);
    exhaustive_ = family.exhaustive;

    std::vector<Matrix> elements;
    for (const auto& e : family.elements) elements.push_back(e.matrix);
    const std::size_t limiting = elements.size();
    Rng rng(seed ^ 0xA5A5A5A5A5A5A5A5ull);
    while (limiting >= 2 && elements.size() < static_cast<std::size_t>(budget)) {
        const auto i = rng.index(limiting);
        const auto j = rng.index(limiting);
        if (i == j) continue;
        const double lambda = rng.uniform();
        elements.push_back(lambda * elements[i] + (1.0 - lambda) * elements[j]);
    }
    for (const auto& w : elements) {
        Matrix wp = pinv(w, tol.tol_class);
        projectors_.push_back(w * wp);
        pinvs_.push_back(std::move(wp));
    }
}

double GammaBruteForce::operator()(const Matrix& y) const {
    const Vector yv = g_.vectorize(y);
    const double bound = tol_.tol_range * (1.0 + y.norm());
    double best = kInf;
    for (std::size_t k = 0; k < pinvs_.size(); ++k) {
        if ((projectors_[k] * yv - yv).norm() > bound) continue;
        best = std::min(best, yv.dot(pinvs_[k] * yv - yv));
    }
    return best;
}

double gamma_bruteforce(const SpectralFrame& frame, const Matrix& y, int budget, std::uint64_t seed,
                        const ToleranceConfig& tol) {
    return GammaBruteForce(frame, budget, seed, tol)(y);
}

OracleReport coderivative_chain_check(const Matrix& u, const Matrix& w_bar, const Vector& d,
                                      double sigma, const ToleranceConfig& tol) {
    if (!(sigma > 0.0)) throw DomainError("coderivative_chain_check: sigma must be positive");
    const auto n = u.rows();
    if (u.cols() != n || w_bar.rows() != n || w_bar.cols() != n || d.size() != n)
        throw ShapeError("coderivative_chain_check: dimension mismatch");
    const Matrix id = Matrix::Identity(n, n);

    auto shifted = [&](double s) { return Matrix(id + (s - 1.0) * u); };
    Eigen::LDLT<Matrix> solver(shifted(sigma));
    if (solver.info() != Eigen::Success || solver.rcond() < 1e-12)
        throw DomainError("coderivative_chain_check: I + (sigma-1)U is ill-conditioned");

    const Vector z = solver.solve((id - u) * d);
    const Matrix u_proj = u * pinv(u, tol.tol_class);
    const Matrix w_proj = w_bar * pinv(w_bar, tol.tol_class);
    const double lhs = z.squaredNorm();
    const double mid = ((id - u_proj) * d).squaredNorm();
    const double rhs = ((id - w_proj) * d).squaredNorm();
    const double slack = 1e-10 * (1.0 + d.squaredNorm());

    OracleReport report{"coderivative_chain_check"};
    report.closed_form = lhs;
    report.oracle = mid;
    report.abs_gap = std::min(lhs - mid, mid - rhs);
    report.tolerance = slack;
    bool ok = lhs >= mid - slack && mid >= rhs - slack;

    // σ → ∞ decay of σ(I+(σ−1)U)⁻¹Ud − UU†d.
    const Vector ud = u * d;
    const Vector target = u_proj * d;
    double previous = kInf;
    double last = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const double s = std::pow(10.0, k);
        const Vector v = s * shifted(s).ldlt().solve(ud) - target;
        last = v.norm();
        // σ·solve amplifies rounding by σ; allow that much jitter
        const double jitter = 64.0 * std::numeric_limits<double>::epsilon() * s * (1.0 + d.norm());
        if (last > previous + jitter) {
            ok = false;
            report.detail = format("decay not monotone at sigma=%.0e (%.3e)", s, last);
        }
        previous = last;
    }
    report.rel_gap = d.norm() > 0.0 ? last / d.norm() : 0.0;
    if (last > 1e-4 * d.norm()) {
        ok = false;
        report.detail = format("decay at sigma=1e6 is %.3e (|d| = %.3e)", last, d.norm());
    }
    report.pass = ok;
    return report;
}

OracleReport coderivative_chain_check(const SpectralFrame& frame,
                                      const std::vector<double>& sigma_list, int trials,
                                      std::uint64_t seed, const ToleranceConfig& tol) {
    if (trials < 1) throw DomainError("coderivative_chain_check: trials must be >= 1");
    if (sigma_list.empty()) throw DomainError("coderivative_chain_check: empty sigma list");
    const Matrix w_bar = canonical_element(frame).matrix;
    const ElementFamily family = sample_limiting_elements(frame, 64, seed);
    Rng rng(seed);

    OracleReport worst{"coderivative_chain_check"};
    worst.pass = true;
    worst.abs_gap = kInf;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        const Vector d = rng.normal_vector(frame.g.vector_dim());
        const Matrix& u = family.elements[rng.index(family.elements.size())].matrix;
        for (double sigma : sigma_list) {
            const OracleReport r = coderivative_chain_check(u, w_bar, d, sigma, tol);
            if (!r.pass) {
                ++failures;
                if (worst.pass) worst = r;
                worst.pass = false;
            } else if (worst.pass && r.abs_gap < worst.abs_gap) {
                worst.abs_gap = r.abs_gap;
                worst.closed_form = r.closed_form;
                worst.oracle = r.oracle;
                worst.tolerance = r.tolerance;
            }
            worst.rel_gap = std::max(worst.rel_gap, r.rel_gap);
        }
    }
    worst.detail = std::to_string(trials * static_cast<int>(sigma_list.size()) - failures) + "/" +
                   std::to_string(trials * sigma_list.size()) + " checks passed" +
                   (worst.detail.empty() ? "" : "; " + worst.detail);
    return worst;
}

Matrix random_psd_point(Rng& rng, const SignPattern& signs) {
    const int m = static_cast<int>(signs.size());
    Vector values(m);
    for (int i = 0; i < m; ++i)
        values(i) = signs[i] == 0 ? 0.0 : (signs[i] > 0 ? 1.0 : -1.0) * rng.uniform(0.5, 3.0);
    const Matrix p = rng.orthogonal(m);
    const Matrix a = sorted_diag_point(p, p, values, m, m);
    return 0.5 * (a + a.transpose());
}

Matrix random_nuclear_point(Rng& rng, int p, int q, const SignPattern& classes) {
    if (static_cast<int>(classes.size()) != p) throw ShapeError("random_nuclear_point: need p classes");
    Vector values(p);
    for (int i = 0; i < p; ++i)
        values(i) = classes[i] > 0 ? rng.uniform(1.5, 4.0) : (classes[i] == 0 ? 1.0 : rng.uniform(0.0, 0.6));
    return sorted_diag_point(rng.orthogonal(p), rng.orthogonal(q), values, p, q);
}

SubgradientPair split_point(const StructuredConvexFunction& g, const Matrix& a) {
    SubgradientPair pair;
    pair.x = prox_apply(g, 1.0, a);
    pair.u = a - pair.x;
    if (g.kind() == FunctionKind::PsdIndicator) pair.u = 0.5 * (pair.u + pair.u.transpose());
    pair.residual = 0.0;
    pair.valid = true;
    return pair;
}

namespace {

SignPattern random_pattern(Rng& rng, int size, bool allow_boundary) {
    SignPattern s(size);
    for (auto& v : s) v = allow_boundary ? static_cast<int>(rng.index(3)) - 1 : (rng.index(2) ? 1 : -1);
    return s;
}

struct Shape {
    FunctionKind kind;
    int rows;
    int cols;
};

const std::vector<Shape>& selftest_shapes() {
    static const std::vector<Shape> shapes = {
        {FunctionKind::PsdIndicator, 2, 2}, {FunctionKind::PsdIndicator, 3, 3},
        {FunctionKind::PsdIndicator, 4, 4}, {FunctionKind::NuclearNorm, 2, 2},
        {FunctionKind::NuclearNorm, 2, 3}, {FunctionKind::NuclearNorm, 3, 3}};
    return shapes;
}

StructuredConvexFunction make_g(const Shape& s) {
    return s.kind == FunctionKind::PsdIndicator ? StructuredConvexFunction::psd_indicator(s.rows)
                                                : StructuredConvexFunction::nuclear_norm(s.rows, s.cols);
}

Matrix random_point(Rng& rng, const Shape& s, bool allow_boundary) {
    const SignPattern pattern = random_pattern(rng, s.rows, allow_boundary);
    return s.kind == FunctionKind::PsdIndicator ? random_psd_point(rng, pattern)
                                                : random_nuclear_point(rng, s.rows, s.cols, pattern);
}

Matrix random_direction(Rng& rng, const StructuredConvexFunction& g) {
    return g.kind() == FunctionKind::PsdIndicator ? rng.symmetric_matrix(g.rows())
                                                  : rng.normal_matrix(g.rows(), g.cols());
}

struct Tally {
    OracleReport report;
    int passed = 0;
    int total = 0;

    explicit Tally(std::string name, double tolerance) : report{std::move(name)} {
        report.tolerance = tolerance;
        report.pass = true;
    }
    void add(bool ok, double gap) {
        ++total;
        passed += ok;
        report.abs_gap = std::max(report.abs_gap, gap);
        report.pass = report.pass && ok;
    }
    OracleReport finish() {
        report.detail = std::to_string(passed) + "/" + std::to_string(total) + " passed";
        report.closed_form = passed;
        report.oracle = total;
        return report;
    }
};

}  // namespace

std::vector<OracleReport> run_selftest(const SelftestOptions& options, const ToleranceConfig& tol) {
    tol.validate();
    std::vector<OracleReport> out;
    const auto& shapes = selftest_shapes();

    // Finite differences of the prox at differentiable points.
    for (FunctionKind kind : {FunctionKind::PsdIndicator, FunctionKind::NuclearNorm}) {
        Tally tally("fd_prox_jacobian[" + to_string(kind) + "]", 1e-5);
        Rng rng(options.seed * 1000003u + static_cast<int>(kind));
        for (int t = 0; t < options.trials; ++t) {
            const auto& shape = shapes[(kind == FunctionKind::NuclearNorm ? 3 : 0) + t % 3];
            const auto g = make_g(shape);
            const OracleReport r =
                fd_prox_jacobian(g, random_point(rng, shape, false), random_direction(rng, g), {1e-4, 1e-5, 1e-6}, tol);
            tally.add(r.pass, r.rel_gap);
        }
        out.push_back(tally.finish());
    }

    // Coderivative norm estimates.
    for (FunctionKind kind : {FunctionKind::PsdIndicator, FunctionKind::NuclearNorm}) {
        Tally tally("coderivative_chain_check[" + to_string(kind) + "]", 1e-10);
        Rng rng(options.seed * 1000033u + static_cast<int>(kind));
        for (int t = 0; t < options.trials; ++t) {
            const auto& shape = shapes[(kind == FunctionKind::NuclearNorm ? 3 : 0) + t % 3];
            const auto g = make_g(shape);
            const SpectralFrame frame = frame_at(g, random_point(rng, shape, true), tol);
            const OracleReport r = coderivative_chain_check(frame, {2.0, 10.0, 100.0}, 1, rng.bits(), tol);
            tally.add(r.pass, r.rel_gap);
        }
        out.push_back(tally.finish());
    }

    // Closed-form Γ against brute force, and Γ against Υ.
    {
        Tally brute("gamma_closed_form_vs_bruteforce", 1e-6);
        Tally ups("gamma_equals_upsilon", 1e-8);
        Rng rng(options.seed * 1000037u);
        for (int t = 0; t < options.trials; ++t) {
            const auto& shape = shapes[t % shapes.size()];
            const auto g = make_g(shape);
            const SpectralFrame frame = frame_at(g, random_point(rng, shape, true), tol);
            const GammaBruteForce oracle(frame, 256, rng.bits(), tol);
            const Matrix proj = range_projector(frame, tol);

            const Matrix y = g.unvectorize(proj * g.vectorize(random_direction(rng, g)));
            const double closed = gamma_closed_form(frame, y, tol);
            const double bf = oracle(y);
            const double gap = std::abs(closed - bf);
            brute.add(std::isfinite(closed) && (oracle.exhaustive() ? gap <= 1e-6 : bf >= closed - 1e-6), gap);

            const double up = upsilon(frame, y, tol);
            const double ugap = std::abs(up - closed);
            ups.add(ugap <= 1e-8 * (1.0 + std::abs(closed)), ugap);
        }
        out.push_back(brute.finish());
        out.push_back(ups.finish());
    }

    // Second-order quotient of the nuclear norm.
    {
        Tally tally("delta2_quotient[nuclear_norm]", 1e-2);
        const auto g = StructuredConvexFunction::nuclear_norm(2, 2);
        Matrix x(2, 2), u(2, 2), d = Matrix::Zero(2, 2);
        x << 2, 0, 0, 0;
        u << 1, 0, 0, 0.5;
        d(0, 1) = 1.0;
        const OracleReport fixed = delta2_quotient(g, x, u, d, {1e-2, 1e-3, 1e-4}, tol);
        tally.add(fixed.pass, fixed.rel_gap);

        Rng rng(options.seed * 1000039u);
        for (int t = 0; t < std::max(1, options.trials / 5); ++t) {
            const auto& shape = shapes[3 + t % 3];
            const auto gt = make_g(shape);
            SignPattern classes(shape.rows, -1);
            classes[0] = 1;
            for (int i = 1; i < shape.rows; ++i) classes[i] = rng.index(2) ? 1 : -1;
            const Matrix a = random_nuclear_point(rng, shape.rows, shape.cols, classes);
            const SubgradientPair pair = split_point(gt, a);
            const SpectralFrame frame = frame_at(gt, a, tol);
            // Directions whose rows below the threshold vanish in the SVD basis.
            Matrix yt = rng.normal_matrix(shape.rows, shape.cols);
            for (int i : frame.lower) yt.row(i).setZero();
            const Matrix dir = frame.left * yt * frame.right.transpose();
            const OracleReport r = delta2_quotient(gt, pair.x, pair.u, dir, {1e-2, 1e-3, 1e-4}, tol);
            tally.add(r.pass, r.rel_gap);
        }
        out.push_back(tally.finish());
    }
    return out;
}

}  // namespace ssocert
