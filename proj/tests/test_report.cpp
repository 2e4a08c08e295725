#include "ssocert/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

using namespace ssocert;
namespace fs = std::filesystem;

namespace {

const char* kScalar = R"({
  "n": 1,
  "f0": {"Q": [[1]], "c": [0], "const": 0},
  "F": {"A0": [[0]], "A": [[[1]]]},
  "g": {"kind": "psd_indicator", "m": 1},
  "candidate": {"x": [0], "u": [[0]]}
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
    try {
        parse_problem_text(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

std::vector<fs::path> fixtures() {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(SSOCERT_FIXTURE_DIR))
        if (entry.path().extension() == ".json") out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

Report certify_report(const fs::path& path, std::uint64_t seed, int threads) {
    const ProblemInput in = parse_problem(path.string());
    const ToleranceConfig tol;
    const KktCandidate kkt = evaluate_kkt(in.problem, in.x, in.u, tol);
    const Certificate cert = certify(in.problem, kkt, default_sigma_grid(), SweepOptions{256, seed, threads}, tol);
    Report r;
    r.command = "certify";
    r.input_sha256 = in.sha256;
    r.seed = seed;
    r.budget = 256;
    r.kkt = KktSummary{kkt.stationarity_residual, kkt.subgradient_residual, kkt.valid};
    r.frame = summarize(make_frame(in.problem.g, in.problem.affine_map(in.x), in.u, tol));
    r.ssosc = cert.ssosc;
    r.sweep = cert.sweep;
    r.equivalence_verdict = to_string(cert.verdict);
    r.sampling_exhaustive = cert.sampling_exhaustive;
    return r;
}

}  // namespace

TEST(ParseProblem, MinimalScalar) {
    const ProblemInput in = parse_problem_text(kScalar);
    EXPECT_EQ(in.problem.n(), 1);
    EXPECT_EQ(in.problem.g.kind(), FunctionKind::PsdIndicator);
    EXPECT_EQ(in.x.size(), 1);
    EXPECT_EQ(in.sha256, sha256_hex(kScalar));
}

TEST(ParseProblem, UnknownKind) {
    const std::string msg = error_of(replace(kScalar, R"("kind": "psd_indicator", "m": 1)", R"("kind": "box")"));
    EXPECT_NE(msg.find("unknown g kind \"box\""), std::string::npos) << msg;
}

TEST(ParseProblem, AsymmetricConstraintMatrixCitesIndex) {
    std::string text = replace(kScalar, R"("m": 1)", R"("m": 2)");
    text = replace(text, R"("A0": [[0]], "A": [[[1]]])",
                   R"("A0": [[0, 0], [0, 0]], "A": [[[1, 0], [0, 1]], [[1, 0.001], [0, 1]]])");
    text = replace(text, R"("n": 1)", R"("n": 2)");
    text = replace(text, R"("Q": [[1]], "c": [0])", R"("Q": [[1, 0], [0, 1]], "c": [0, 0])");
    text = replace(text, R"("x": [0], "u": [[0]])", R"("x": [0, 0], "u": [[0, 0], [0, 0]])");
    const std::string msg = error_of(text);
    EXPECT_NE(msg.find("F.A[1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("not symmetric"), std::string::npos) << msg;
}

TEST(ParseProblem, NamesMissingKeysAndBadShapes) {
    EXPECT_NE(error_of(replace(kScalar, R"("c": [0], )", "")).find("f0.c"), std::string::npos);
    EXPECT_NE(error_of(replace(kScalar, R"("A0": [[0]])", R"("A0": [[0, 1]])")).find("F.A0"), std::string::npos);
    EXPECT_NE(error_of(replace(kScalar, R"("Q": [[1]])", R"("Q": [[1], [2]])")).find("f0.Q"), std::string::npos);
    EXPECT_NE(error_of("{not json").find("not valid JSON"), std::string::npos);
    EXPECT_THROW(parse_problem("/nonexistent/problem.json"), InputError);
}

TEST(ParseProblem, NonSymmetricQ) {
    std::string text = replace(kScalar, R"("Q": [[1]], "c": [0])", R"("Q": [[1, 0], [1e-9, 1]], "c": [0, 0])");
    text = replace(text, R"("n": 1)", R"("n": 2)");
    EXPECT_NE(error_of(text).find("f0.Q"), std::string::npos);
}

TEST(ParseDirection, BareAndWrapped) {
    EXPECT_EQ(parse_direction_text("[[1, 2], [3, 4]]")(1, 0), 3.0);
    EXPECT_EQ(parse_direction_text(R"({"Y": [[1, 2]]})")(0, 1), 2.0);
    EXPECT_THROW(parse_direction_text(R"({"Z": 1})"), InputError);
}

TEST(Sha256, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(EmitReport, SeventeenDigitsAndInfinity) {
    Report r;
    r.command = "ssosc";
    r.ssosc = SsoscResult{std::numeric_limits<double>::infinity(), true, 0};
    r.gamma = 0.1;
    const std::string text = emit_report(r);
    EXPECT_NE(text.find(R"("margin": "+inf")"), std::string::npos) << text;
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos) << text;
    EXPECT_EQ(parse_report_text(text), r);
}

TEST(EmitReport, KeysAreSorted) {
    Report r;
    r.command = "kkt";
    r.kkt = KktSummary{1e-17, 0.0, true};
    const std::string text = emit_report(r);
    EXPECT_LT(text.find("\"budget\""), text.find("\"command\""));
    EXPECT_LT(text.find("\"command\""), text.find("\"kkt\""));
    EXPECT_LT(text.find("\"kkt\""), text.find("\"tolerances\""));
}

TEST(EmitReport, FixtureSuiteRoundTrips) {
    const auto paths = fixtures();
    ASSERT_GE(paths.size(), 12u);
    for (const auto& path : paths) {
        const Report r = certify_report(path, 42, 1);
        const std::string text = emit_report(r);
        const Report back = parse_report_text(text);
        EXPECT_EQ(back, r) << path;
        EXPECT_EQ(emit_report(back), text) << path;
        EXPECT_EQ(emit_report(certify_report(path, 42, 1)), text) << path;
    }
}

TEST(EmitReport, WritesFile) {
    Report r;
    r.command = "frame";
    const fs::path out = fs::temp_directory_path() / "ssocert_report_test.json";
    emit_report(r, out.string());
    EXPECT_EQ(read_file(out.string()), emit_report(r));
    fs::remove(out);
    EXPECT_THROW(emit_report(r, "/nonexistent/dir/report.json"), std::runtime_error);
}
