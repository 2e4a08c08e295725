#include "ssocert/cli.hpp"

#include "ssocert/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace ssocert::cli {

namespace {

struct Flags {
    std::string problem;
    std::string report;
    std::string direction;
    std::string sigma_grid;
    double tol_pd = ToleranceConfig{}.tol_pd;
    double tol_class = ToleranceConfig{}.tol_class;
    double tol_range = ToleranceConfig{}.tol_range;
    int budget = SweepOptions{}.budget;
    std::uint64_t seed = 0;
    int trials = SelftestOptions{}.trials;
    int threads = 1;
};

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) return default_sigma_grid();
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end == item.c_str() || *end != '\0')
            throw InputError("--sigma-grid: cannot parse \"" + item + "\"");
        grid.push_back(v);
    }
    return grid;
}

ToleranceConfig tolerances(const Flags& f) {
    ToleranceConfig tol;
    tol.tol_pd = f.tol_pd;
    tol.tol_class = f.tol_class;
    tol.tol_range = f.tol_range;
    tol.validate();
    return tol;
}

Report execute(const std::string& command, const Flags& f) {
    const ToleranceConfig tol = tolerances(f);
    Report report;
    report.command = command;
    report.seed = f.seed;
    report.budget = f.budget;
    report.tolerances = tol;

    if (command == "selftest") {
        if (f.trials < 1) throw InputError("--trials must be >= 1");
        report.selftest = run_selftest(SelftestOptions{f.trials, f.seed}, tol);
        return report;
    }

    if (f.problem.empty()) throw InputError("--problem is required for " + command);
    if (f.budget < 1) throw InputError("--budget must be >= 1");
    if (f.threads < 1) throw InputError("--threads must be >= 1");
    const ProblemInput input = parse_problem(f.problem);
    report.input_sha256 = input.sha256;
    const CompositeProblem& problem = input.problem;

    const KktCandidate kkt = evaluate_kkt(problem, input.x, input.u, tol);
    report.kkt = KktSummary{kkt.stationarity_residual, kkt.subgradient_residual, kkt.valid};
    if (command == "kkt") return report;

    const SweepOptions sweep_options{f.budget, f.seed, f.threads};

    if (command == "sweep") {
        report.sweep = hessian_pd_sweep(problem, kkt, parse_grid(f.sigma_grid), sweep_options, tol);
        return report;
    }

    const SpectralFrame frame = make_frame(problem.g, problem.affine_map(input.x), input.u, tol);
    report.frame = summarize(frame);
    if (command == "frame") return report;

    if (command == "gamma") {
        if (f.direction.empty()) throw InputError("--direction is required for gamma");
        const Matrix y = parse_direction_text(read_file(f.direction));
        problem.g.check_shape(y, "direction");
        report.gamma = gamma_closed_form(frame, y, tol);
        return report;
    }

    if (command == "ssosc") {
        report.ssosc = ssosc_margin(problem, kkt, tol);
        return report;
    }

    // certify
    const Certificate cert = certify(problem, kkt, parse_grid(f.sigma_grid), sweep_options, tol);
    report.ssosc = cert.ssosc;
    report.sweep = cert.sweep;
    report.equivalence_verdict = to_string(cert.verdict);
    report.sampling_exhaustive = cert.sampling_exhaustive;
    return report;
}

bool selftest_failed(const Report& report) {
    if (!report.selftest) return false;
    return std::any_of(report.selftest->begin(), report.selftest->end(),
                       [](const OracleReport& r) { return !r.pass && !r.flagged; });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Second-order sufficiency certificates for composite problems with PSD or nuclear-norm terms",
                 "ssocert"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"kkt", "KKT residuals of the candidate"},
        {"frame", "spectral frame and index partition of F(x)+u"},
        {"gamma", "second-order variational function along --direction"},
        {"ssosc", "strong second-order sufficient condition margin"},
        {"sweep", "minimum eigenvalue of augmented Lagrangian Hessians over a sigma grid"},
        {"certify", "SSOSC, sigma sweep and their agreement"},
        {"selftest", "run the closed-form vs oracle suites"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        if (name != "selftest") {
            sub->add_option("--problem", flags.problem, "problem JSON file")->check(CLI::ExistingFile);
        }
        sub->add_option("--report", flags.report, "write the report here instead of stdout");
        sub->add_option("--tol-pd", flags.tol_pd, "positive-definiteness margin");
        sub->add_option("--tol-class", flags.tol_class, "eigen/singular value classification band");
        sub->add_option("--tol-range", flags.tol_range, "range-membership tolerance");
        sub->add_option("--seed", flags.seed, "RNG seed");
        if (name == "gamma")
            sub->add_option("--direction", flags.direction, "direction JSON file")->check(CLI::ExistingFile);
        if (name == "sweep" || name == "certify") {
            sub->add_option("--sigma-grid", flags.sigma_grid, "comma separated, ascending");
            sub->add_option("--budget", flags.budget, "max Jacobian elements per sigma");
            sub->add_option("--threads", flags.threads, "worker threads for the sweep");
        }
        if (name == "selftest") sub->add_option("--trials", flags.trials, "random trials per suite");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kComputed : kInputError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const Report report = execute(command, flags);
        if (flags.report.empty())
            out << emit_report(report);
        else
            emit_report(report, flags.report);
        if (selftest_failed(report)) {
            err << "selftest: at least one oracle suite failed\n";
            return kInternalError;
        }
        return kComputed;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ShapeError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace ssocert::cli
