#include "ssocert/cli.hpp"
#include "ssocert/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ssocert;

namespace {

py::dict frame_dict(const SpectralFrame& f) {
    py::dict d;
    d["kind"] = to_string(f.g.kind());
    d["values"] = Vector(f.values);
    d["left"] = f.left;
    d["right"] = f.right;
    d["upper"] = f.upper;
    d["boundary"] = f.boundary;
    d["lower"] = f.lower;
    d["band_active"] = f.band_active;
    return d;
}

py::object report_to_python(const Report& r) {
    return py::module_::import("json").attr("loads")(emit_report(r));
}

Report certify_file(const std::string& path, const std::vector<double>& grid, int budget, std::uint64_t seed,
                    int threads) {
    const ProblemInput in = parse_problem(path);
    const ToleranceConfig tol;
    const KktCandidate kkt = evaluate_kkt(in.problem, in.x, in.u, tol);
    const Certificate cert =
        certify(in.problem, kkt, grid.empty() ? default_sigma_grid() : grid, SweepOptions{budget, seed, threads}, tol);
    Report r;
    r.command = "certify";
    r.input_sha256 = in.sha256;
    r.seed = seed;
    r.budget = budget;
    r.tolerances = tol;
    r.kkt = KktSummary{kkt.stationarity_residual, kkt.subgradient_residual, kkt.valid};
    r.frame = summarize(make_frame(in.problem.g, in.problem.affine_map(in.x), in.u, tol));
    r.ssosc = cert.ssosc;
    r.sweep = cert.sweep;
    r.equivalence_verdict = to_string(cert.verdict);
    r.sampling_exhaustive = cert.sampling_exhaustive;
    return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Second-order sufficiency certificates for PSD-cone and nuclear-norm composite problems.";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<StructuredConvexFunction>(m, "Function")
        .def_static("psd_indicator", &StructuredConvexFunction::psd_indicator, py::arg("m"))
        .def_static("nuclear_norm", &StructuredConvexFunction::nuclear_norm, py::arg("p"), py::arg("q"))
        .def_property_readonly("kind", [](const StructuredConvexFunction& g) { return to_string(g.kind()); })
        .def_property_readonly("shape", [](const StructuredConvexFunction& g) { return py::make_tuple(g.rows(), g.cols()); })
        .def_property_readonly("vector_dim", &StructuredConvexFunction::vector_dim)
        .def("vectorize", &StructuredConvexFunction::vectorize)
        .def("unvectorize", &StructuredConvexFunction::unvectorize)
        .def("__call__", [](const StructuredConvexFunction& g, const Matrix& a) { return g.value(a); })
        .def("__repr__", [](const StructuredConvexFunction& g) {
            return "<Function " + to_string(g.kind()) + " " + std::to_string(g.rows()) + "x" +
                   std::to_string(g.cols()) + ">";
        });

    m.def("prox", &prox_apply, py::arg("g"), py::arg("sigma"), py::arg("w"));
    m.def("prox_conjugate", &prox_conjugate_apply, py::arg("g"), py::arg("sigma"), py::arg("w"));
    m.def("moreau_envelope", &moreau_envelope, py::arg("g"), py::arg("sigma"), py::arg("w"));

    m.def("frame", [](const StructuredConvexFunction& g, const Matrix& a) { return frame_dict(frame_at(g, a)); },
          py::arg("g"), py::arg("a"), "Spectral frame and index partition of a (0-based indices).");

    m.def("canonical_element",
          [](const StructuredConvexFunction& g, const Matrix& a) { return canonical_element(frame_at(g, a)).matrix; },
          py::arg("g"), py::arg("a"));
    m.def("limiting_elements",
          [](const StructuredConvexFunction& g, const Matrix& a, int budget, std::uint64_t seed) {
              std::vector<Matrix> out;
              for (const auto& e : sample_limiting_elements(frame_at(g, a), budget, seed).elements)
                  out.push_back(e.matrix);
              return out;
          },
          py::arg("g"), py::arg("a"), py::arg("budget") = 256, py::arg("seed") = 0);
    m.def("gamma", [](const StructuredConvexFunction& g, const Matrix& a, const Matrix& y) {
              return gamma_closed_form(frame_at(g, a), y);
          },
          py::arg("g"), py::arg("a"), py::arg("y"), "Second-order variational function at frame a along y.");
    m.def("gamma_bruteforce",
          [](const StructuredConvexFunction& g, const Matrix& a, const Matrix& y, int budget, std::uint64_t seed) {
              return gamma_bruteforce(frame_at(g, a), y, budget, seed);
          },
          py::arg("g"), py::arg("a"), py::arg("y"), py::arg("budget") = 256, py::arg("seed") = 0);

    m.def("certify", [](const std::string& path, const std::vector<double>& grid, int budget, std::uint64_t seed,
                        int threads) { return report_to_python(certify_file(path, grid, budget, seed, threads)); },
          py::arg("problem"), py::arg("sigma_grid") = std::vector<double>{}, py::arg("budget") = 256,
          py::arg("seed") = 0, py::arg("threads") = 1, "Certify a problem file; returns the report as a dict.");

    m.def("selftest", [](int trials, std::uint64_t seed) {
              Report r;
              r.command = "selftest";
              r.seed = seed;
              r.selftest = run_selftest(SelftestOptions{trials, seed});
              return report_to_python(r);
          },
          py::arg("trials") = 100, py::arg("seed") = 7);

    m.def("main", [](const std::vector<std::string>& args) {
              std::vector<const char*> argv{"ssocert"};
              for (const auto& a : args) argv.push_back(a.c_str());
              std::ostringstream out, err;
              const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Run the command-line tool; returns (exit_code, stdout, stderr).");
}
