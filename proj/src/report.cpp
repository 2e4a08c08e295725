#include "ssocert/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ssocert {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw InputError("missing key \"" + where + key + "\"");
    return obj.at(key);
}

double number_at(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "+inf" || s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw InputError("\"" + where + "\" must be a number");
}

int int_at(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InputError("\"" + where + "\" must be an integer");
    return v.get<int>();
}

Vector vector_at(const json& v, const std::string& where) {
    if (!v.is_array()) throw InputError("\"" + where + "\" must be an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = number_at(v[i], where + "[" + std::to_string(i) + "]");
    return out;
}

Matrix matrix_at(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || !v[0].is_array())
        throw InputError("\"" + where + "\" must be a non-empty array of rows");
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].size();
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != cols)
            throw InputError("\"" + row_where + "\" must have " + std::to_string(cols) + " entries");
        for (std::size_t j = 0; j < cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                number_at(v[i][j], row_where + "[" + std::to_string(j) + "]");
    }
    if (!out.allFinite()) throw InputError("\"" + where + "\" has non-finite entries");
    return out;
}

std::string shape_of(const Matrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void expect_shape(const Matrix& a, int rows, int cols, const std::string& where) {
    if (a.rows() != rows || a.cols() != cols)
        throw InputError("\"" + where + "\" has shape " + shape_of(a) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
}

constexpr double kSymTol = 1e-12;

void expect_symmetric(const Matrix& a, const std::string& where) {
    if (!is_symmetric(a, kSymTol))
        throw InputError("\"" + where + "\" is not symmetric (tolerance 1e-12)");
}

json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("+inf") : json("-inf");
    return json(v);
}

void write_json(std::ostringstream& out, const json& v, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close_pad(2 * depth, ' ');
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << json(it.key()).dump() << ": ";
                write_json(out, it.value(), depth + 1);
            }
            out << "\n" << close_pad << "}";
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) out << ",\n";
                out << pad;
                write_json(out, v[i], depth + 1);
            }
            out << "\n" << close_pad << "]";
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                out << (std::isnan(d) ? "\"nan\"" : (d > 0 ? "\"+inf\"" : "\"-inf\""));
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            std::string s = buf;
            // keep floats recognisable as floats when read back
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            out << s;
            return;
        }
        default:
            out << v.dump();
    }
}

json indices_json(const std::vector<int>& idx) {
    return json(idx);
}

json tolerances_json(const ToleranceConfig& t) {
    return json{{"tol_class", t.tol_class}, {"tol_orth", t.tol_orth}, {"tol_recon", t.tol_recon},
                {"tol_pd", t.tol_pd}, {"tol_range", t.tol_range}};
}

ToleranceConfig tolerances_from(const json& j) {
    ToleranceConfig t;
    t.tol_class = number_at(require(j, "tol_class", "tolerances."), "tol_class");
    t.tol_orth = number_at(require(j, "tol_orth", "tolerances."), "tol_orth");
    t.tol_recon = number_at(require(j, "tol_recon", "tolerances."), "tol_recon");
    t.tol_pd = number_at(require(j, "tol_pd", "tolerances."), "tol_pd");
    t.tol_range = number_at(require(j, "tol_range", "tolerances."), "tol_range");
    return t;
}

json oracle_json(const OracleReport& r) {
    return json{{"quantity", r.quantity},
                {"closed_form", number_json(r.closed_form)},
                {"oracle", number_json(r.oracle)},
                {"abs_gap", number_json(r.abs_gap)},
                {"rel_gap", number_json(r.rel_gap)},
                {"tolerance", number_json(r.tolerance)},
                {"pass", r.pass},
                {"flagged", r.flagged},
                {"detail", r.detail}};
}

OracleReport oracle_from(const json& j) {
    OracleReport r;
    r.quantity = require(j, "quantity", "selftest[].").get<std::string>();
    r.closed_form = number_at(require(j, "closed_form", "selftest[]."), "closed_form");
    r.oracle = number_at(require(j, "oracle", "selftest[]."), "oracle");
    r.abs_gap = number_at(require(j, "abs_gap", "selftest[]."), "abs_gap");
    r.rel_gap = number_at(require(j, "rel_gap", "selftest[]."), "rel_gap");
    r.tolerance = number_at(require(j, "tolerance", "selftest[]."), "tolerance");
    r.pass = require(j, "pass", "selftest[].").get<bool>();
    r.flagged = require(j, "flagged", "selftest[].").get<bool>();
    r.detail = require(j, "detail", "selftest[].").get<std::string>();
    return r;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

ProblemInput parse_problem_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("problem file is not valid JSON: ") + e.what());
    }

    const int n = int_at(require(doc, "n", ""), "n");
    if (n < 1) throw InputError("\"n\" must be >= 1");

    const json& gj = require(doc, "g", "");
    const auto kind = require(gj, "kind", "g.");
    if (!kind.is_string()) throw InputError("\"g.kind\" must be a string");
    const std::string kind_name = kind.get<std::string>();
    std::optional<StructuredConvexFunction> g;
    if (kind_name == "psd_indicator") {
        const int m = int_at(require(gj, "m", "g."), "g.m");
        if (m < 1) throw InputError("\"g.m\" must be >= 1");
        g = StructuredConvexFunction::psd_indicator(m);
    } else if (kind_name == "nuclear_norm") {
        const int p = int_at(require(gj, "p", "g."), "g.p");
        const int q = int_at(require(gj, "q", "g."), "g.q");
        if (p < 1 || p > q) throw InputError("\"g.p\", \"g.q\" must satisfy 1 <= p <= q");
        g = StructuredConvexFunction::nuclear_norm(p, q);
    } else {
        throw InputError("unknown g kind \"" + kind_name + "\" (expected psd_indicator or nuclear_norm)");
    }
    const bool psd = g->kind() == FunctionKind::PsdIndicator;

    const json& f0 = require(doc, "f0", "");
    Matrix q = matrix_at(require(f0, "Q", "f0."), "f0.Q");
    expect_shape(q, n, n, "f0.Q");
    expect_symmetric(q, "f0.Q");
    Vector c = vector_at(require(f0, "c", "f0."), "f0.c");
    if (c.size() != n) throw InputError("\"f0.c\" must have n entries");
    const double constant = f0.contains("const") ? number_at(f0.at("const"), "f0.const") : 0.0;

    const json& fj = require(doc, "F", "");
    Matrix a0 = matrix_at(require(fj, "A0", "F."), "F.A0");
    expect_shape(a0, g->rows(), g->cols(), "F.A0");
    if (psd) expect_symmetric(a0, "F.A0");
    const json& aj = require(fj, "A", "F.");
    if (!aj.is_array() || static_cast<int>(aj.size()) != n)
        throw InputError("\"F.A\" must be an array of n matrices");
    std::vector<Matrix> a;
    for (int i = 0; i < n; ++i) {
        const std::string where = "F.A[" + std::to_string(i) + "]";
        Matrix ai = matrix_at(aj[i], where);
        expect_shape(ai, g->rows(), g->cols(), where);
        if (psd) expect_symmetric(ai, where);
        a.push_back(std::move(ai));
    }

    const json& cand = require(doc, "candidate", "");
    Vector x = vector_at(require(cand, "x", "candidate."), "candidate.x");
    if (x.size() != n) throw InputError("\"candidate.x\" must have n entries");
    Matrix u = matrix_at(require(cand, "u", "candidate."), "candidate.u");
    expect_shape(u, g->rows(), g->cols(), "candidate.u");
    if (psd) expect_symmetric(u, "candidate.u");

    ProblemInput input{CompositeProblem{std::move(q), std::move(c), constant, std::move(a0), std::move(a), *g},
                       std::move(x), std::move(u), sha256_hex(text)};
    input.problem.validate(kSymTol);
    return input;
}

ProblemInput parse_problem(const std::string& path) {
    return parse_problem_text(read_file(path));
}

Matrix parse_direction_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("direction file is not valid JSON: ") + e.what());
    }
    if (doc.is_object()) return matrix_at(require(doc, "Y", ""), "Y");
    return matrix_at(doc, "direction");
}

FrameSummary summarize(const SpectralFrame& frame) {
    FrameSummary s;
    s.kind = to_string(frame.g.kind());
    s.values.assign(frame.values.data(), frame.values.data() + frame.values.size());
    auto one_based = [](const std::vector<int>& idx) {
        std::vector<int> out;
        for (int i : idx) out.push_back(i + 1);
        return out;
    };
    s.upper = one_based(frame.upper);
    s.boundary = one_based(frame.boundary);
    s.lower = one_based(frame.lower);
    s.band_active = frame.band_active;
    return s;
}

json to_json(const Report& r) {
    json doc;
    doc["command"] = r.command;
    doc["tool_version"] = r.tool_version;
    doc["input_sha256"] = r.input_sha256;
    doc["seed"] = r.seed;
    doc["budget"] = r.budget;
    doc["tolerances"] = tolerances_json(r.tolerances);
    if (r.kkt)
        doc["kkt"] = json{{"stationarity_residual", number_json(r.kkt->stationarity_residual)},
                          {"subgradient_residual", number_json(r.kkt->subgradient_residual)},
                          {"valid", r.kkt->valid}};
    if (r.frame) {
        json values = json::array();
        for (double v : r.frame->values) values.push_back(number_json(v));
        doc["frame"] = json{{"kind", r.frame->kind},
                            {"values", values},
                            {"partition", json{{"upper", indices_json(r.frame->upper)},
                                               {"boundary", indices_json(r.frame->boundary)},
                                               {"lower", indices_json(r.frame->lower)}}},
                            {"band_active", r.frame->band_active}};
    }
    if (r.gamma) doc["gamma"] = number_json(*r.gamma);
    if (r.ssosc)
        doc["ssosc"] = json{{"margin", number_json(r.ssosc->margin)},
                            {"holds", r.ssosc->holds},
                            {"subspace_dim", r.ssosc->subspace_dim}};
    if (r.sweep) {
        json arr = json::array();
        for (const auto& e : *r.sweep)
            arr.push_back(json{{"sigma", number_json(e.sigma)},
                               {"min_eig", number_json(e.min_eig)},
                               {"pd", e.pd},
                               {"elements_tested", e.elements_tested},
                               {"exhaustive", e.exhaustive}});
        doc["sweep"] = arr;
    }
    if (r.equivalence_verdict) doc["equivalence_verdict"] = *r.equivalence_verdict;
    if (r.sampling_exhaustive) doc["sampling_exhaustive"] = *r.sampling_exhaustive;
    if (r.selftest) {
        json arr = json::array();
        for (const auto& o : *r.selftest) arr.push_back(oracle_json(o));
        doc["selftest"] = arr;
    }
    return doc;
}

Report report_from_json(const json& doc) {
    Report r;
    r.command = require(doc, "command", "").get<std::string>();
    r.tool_version = require(doc, "tool_version", "").get<std::string>();
    r.input_sha256 = require(doc, "input_sha256", "").get<std::string>();
    r.seed = require(doc, "seed", "").get<std::uint64_t>();
    r.budget = require(doc, "budget", "").get<int>();
    r.tolerances = tolerances_from(require(doc, "tolerances", ""));
    if (doc.contains("kkt")) {
        const json& k = doc.at("kkt");
        r.kkt = KktSummary{number_at(require(k, "stationarity_residual", "kkt."), "kkt.stationarity_residual"),
                           number_at(require(k, "subgradient_residual", "kkt."), "kkt.subgradient_residual"),
                           require(k, "valid", "kkt.").get<bool>()};
    }
    if (doc.contains("frame")) {
        const json& f = doc.at("frame");
        FrameSummary s;
        s.kind = require(f, "kind", "frame.").get<std::string>();
        for (const auto& v : require(f, "values", "frame.")) s.values.push_back(number_at(v, "frame.values"));
        const json& part = require(f, "partition", "frame.");
        s.upper = require(part, "upper", "frame.partition.").get<std::vector<int>>();
        s.boundary = require(part, "boundary", "frame.partition.").get<std::vector<int>>();
        s.lower = require(part, "lower", "frame.partition.").get<std::vector<int>>();
        s.band_active = require(f, "band_active", "frame.").get<bool>();
        r.frame = s;
    }
    if (doc.contains("gamma")) r.gamma = number_at(doc.at("gamma"), "gamma");
    if (doc.contains("ssosc")) {
        const json& s = doc.at("ssosc");
        r.ssosc = SsoscResult{number_at(require(s, "margin", "ssosc."), "ssosc.margin"),
                              require(s, "holds", "ssosc.").get<bool>(),
                              require(s, "subspace_dim", "ssosc.").get<int>()};
    }
    if (doc.contains("sweep")) {
        std::vector<SweepEntry> entries;
        for (const auto& e : doc.at("sweep"))
            entries.push_back(SweepEntry{number_at(require(e, "sigma", "sweep[]."), "sigma"),
                                         number_at(require(e, "min_eig", "sweep[]."), "min_eig"),
                                         require(e, "pd", "sweep[].").get<bool>(),
                                         require(e, "elements_tested", "sweep[].").get<int>(),
                                         require(e, "exhaustive", "sweep[].").get<bool>()});
        r.sweep = entries;
    }
    if (doc.contains("equivalence_verdict"))
        r.equivalence_verdict = doc.at("equivalence_verdict").get<std::string>();
    if (doc.contains("sampling_exhaustive")) r.sampling_exhaustive = doc.at("sampling_exhaustive").get<bool>();
    if (doc.contains("selftest")) {
        std::vector<OracleReport> reports;
        for (const auto& o : doc.at("selftest")) reports.push_back(oracle_from(o));
        r.selftest = reports;
    }
    return r;
}

std::string dump_json(const json& doc) {
    std::ostringstream out;
    write_json(out, doc, 0);
    out << "\n";
    return out.str();
}

std::string emit_report(const Report& report) {
    return dump_json(to_json(report));
}

void emit_report(const Report& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file " + path);
    out << emit_report(report);
    if (!out) throw std::runtime_error("failed writing report file " + path);
}

Report parse_report_text(const std::string& text) {
    try {
        return report_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace ssocert
