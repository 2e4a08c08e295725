#pragma once

#include "ssocert/oracles.hpp"
#include "ssocert/sovf.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssocert {

inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed problem/direction/report file. The message names the key or
/// shape at fault.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemInput {
    CompositeProblem problem;
    Vector x;
    Matrix u;
    std::string sha256;  ///< digest of the file contents
};

/// Parses and validates a problem document (see README for the schema).
ProblemInput parse_problem_text(const std::string& text);
ProblemInput parse_problem(const std::string& path);

/// A direction file holds either a bare matrix or {"Y": matrix}.
Matrix parse_direction_text(const std::string& text);

struct KktSummary {
    double stationarity_residual = 0.0;
    double subgradient_residual = 0.0;
    bool valid = false;
    bool operator==(const KktSummary&) const = default;
};

struct FrameSummary {
    std::string kind;
    std::vector<double> values;
    std::vector<int> upper;     ///< 1-based indices
    std::vector<int> boundary;
    std::vector<int> lower;
    bool band_active = false;
    bool operator==(const FrameSummary&) const = default;
};

FrameSummary summarize(const SpectralFrame& frame);

struct Report {
    std::string command;
    std::string tool_version = kToolVersion;
    std::string input_sha256;
    std::uint64_t seed = 0;
    int budget = 0;
    ToleranceConfig tolerances;
    std::optional<KktSummary> kkt;
    std::optional<FrameSummary> frame;
    std::optional<double> gamma;
    std::optional<SsoscResult> ssosc;
    std::optional<std::vector<SweepEntry>> sweep;
    std::optional<std::string> equivalence_verdict;
    std::optional<bool> sampling_exhaustive;
    std::optional<std::vector<OracleReport>> selftest;

    bool operator==(const Report&) const = default;
};

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

/// Serializes with sorted keys and two-space indentation. Doubles get 17
/// significant digits; infinities become "+inf"/"-inf".
std::string dump_json(const nlohmann::json& doc);

std::string emit_report(const Report& report);
void emit_report(const Report& report, const std::string& path);
Report parse_report_text(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace ssocert
