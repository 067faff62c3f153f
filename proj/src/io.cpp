#include "ccgf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ccgf::io {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical emission
// ---------------------------------------------------------------------------

void emit_real(std::string& out, double x) {
    if (std::isinf(x)) {
        out += x > 0 ? "\"inf\"" : "\"-inf\"";
        return;
    }
    if (std::isnan(x)) {
        out += "\"nan\"";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

void emit_string(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x",
                                  static_cast<unsigned>(static_cast<unsigned char>(ch)));
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void emit_complex(std::string& out, const Complex& z) {
    out += '[';
    emit_real(out, z.real());
    out += ',';
    emit_real(out, z.imag());
    out += ']';
}

void emit_matrix(std::string& out, const Eigen::MatrixXcd& M) {
    out += '[';
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        if (r) out += ',';
        out += '[';
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) out += ',';
            emit_complex(out, M(r, c));
        }
        out += ']';
    }
    out += ']';
}

void emit_blocks(std::string& out, const std::vector<Eigen::MatrixXcd>& blocks) {
    out += '[';
    for (size_t s = 0; s < blocks.size(); ++s) {
        if (s) out += ',';
        emit_matrix(out, blocks[s]);
    }
    out += ']';
}

void emit_real_array(std::string& out, const std::vector<double>& xs) {
    out += '[';
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        emit_real(out, xs[i]);
    }
    out += ']';
}

void emit_slot_spectra(std::string& out, const std::vector<SlotSpectrum>& spectra) {
    out += '[';
    for (size_t s = 0; s < spectra.size(); ++s) {
        if (s) out += ',';
        out += "{\"lambda_min\":";
        emit_real(out, spectra[s].lambda_min);
        out += ",\"lambda_max\":";
        emit_real(out, spectra[s].lambda_max);
        out += '}';
    }
    out += ']';
}

void emit_assessment_body(std::string& out, const FrameAssessment& a) {
    out += "{\"A_opt\":";
    emit_real(out, a.A_opt);
    out += ",\"B_opt\":";
    emit_real(out, a.B_opt);
    out += ",\"is_bessel\":";
    out += a.is_bessel ? "true" : "false";
    out += ",\"is_frame\":";
    out += a.is_frame ? "true" : "false";
    out += ",\"is_tight\":";
    out += a.is_tight ? "true" : "false";
    out += ",\"is_parseval\":";
    out += a.is_parseval ? "true" : "false";
    out += ",\"per_slot\":";
    emit_slot_spectra(out, a.per_slot);
    if (a.k_verdict) {
        out += ",\"k_verdict\":{\"A_K\":";
        emit_real(out, a.k_verdict->A_K);
        out += ",\"is_K_frame\":";
        out += a.k_verdict->is_K_frame ? "true" : "false";
        out += '}';
    }
    out += '}';
}

// ---------------------------------------------------------------------------
// Parsing helpers (strict shape, IoError on anything off)
// ---------------------------------------------------------------------------

[[noreturn]] void bad(const std::string& what) { throw IoError("document: " + what); }

double real_from(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    bad(std::string(what) + " must be a number");
}

Complex complex_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) bad(std::string(what) + " must be [re,im]");
    return Complex(real_from(j[0], what), real_from(j[1], what));
}

Eigen::MatrixXcd matrix_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) bad(std::string(what) + " must be a non-empty row list");
    const size_t rows = j.size();
    size_t cols = 0;
    Eigen::MatrixXcd M;
    for (size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.empty()) bad(std::string(what) + " row must be non-empty");
        if (r == 0) {
            cols = row.size();
            M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            bad(std::string(what) + " rows must have equal length");
        }
        for (size_t c = 0; c < cols; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from(row[c], what);
    }
    return M;
}

std::vector<Eigen::MatrixXcd> blocks_from(const json& j, int m, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != m)
        bad(std::string(what) + " must list one block per slot");
    std::vector<Eigen::MatrixXcd> blocks;
    blocks.reserve(j.size());
    for (const json& bl : j) blocks.push_back(matrix_from(bl, what));
    return blocks;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

int int_from(const json& j, const char* what) {
    if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
    return j.get<int>();
}

void require_square(const std::vector<Eigen::MatrixXcd>& blocks, int n, const char* what) {
    for (const auto& bl : blocks)
        if (bl.rows() != n || bl.cols() != n) bad(std::string(what) + " blocks must be n x n");
}

}  // namespace

std::string format_real(double x) {
    std::string out;
    emit_real(out, x);
    return out;
}

// ---------------------------------------------------------------------------
// Instance documents
// ---------------------------------------------------------------------------

InstanceDocument make_document(const GFusionSystem& sys, const ControllerPair& ctrl,
                               const std::optional<AdjointableOp>& K,
                               InstanceMetadata metadata) {
    InstanceDocument doc;
    doc.m = sys.slot_count();
    doc.n = sys.dim();
    doc.J = sys.member_count();
    for (int j = 0; j < doc.J; ++j) {
        const FrameMember& mb = sys.member(j);
        MemberDocument md;
        for (int s = 0; s < doc.m; ++s) {
            md.P.push_back(mb.P.op().block(s));
            md.Lambda.push_back(mb.Lambda.block(s));
            md.v.push_back(mb.v[s].real());
        }
        doc.members.push_back(std::move(md));
    }
    for (int s = 0; s < doc.m; ++s) {
        doc.C.push_back(ctrl.C().block(s));
        doc.C_prime.push_back(ctrl.C_prime().block(s));
    }
    if (K) {
        std::vector<Eigen::MatrixXcd> kb;
        for (int s = 0; s < doc.m; ++s) kb.push_back(K->block(s));
        doc.K = std::move(kb);
    }
    doc.metadata = std::move(metadata);
    return doc;
}

LoadedInstance realize(const InstanceDocument& doc) {
    std::vector<FrameMember> members;
    members.reserve(doc.members.size());
    for (const MemberDocument& md : doc.members) {
        std::vector<Complex> v;
        v.reserve(md.v.size());
        for (double w : md.v) v.emplace_back(w, 0.0);
        members.push_back(FrameMember{Projector(AdjointableOp(md.P)),
                                      AdjointableOp(md.Lambda),
                                      AlgebraElement(std::move(v))});
    }
    GFusionSystem sys = build_frame_system(doc.m, doc.n, std::move(members));
    ControllerPair ctrl =
        make_controller_pair(sys, AdjointableOp(doc.C), AdjointableOp(doc.C_prime));
    std::optional<AdjointableOp> K;
    if (doc.K) K = AdjointableOp(*doc.K);
    return LoadedInstance{std::move(sys), std::move(ctrl), std::move(K), doc.metadata};
}

std::string to_json(const InstanceDocument& doc) {
    std::string out;
    out += "{\"schema_version\":";
    out += std::to_string(doc.schema_version);
    out += ",\"m\":";
    out += std::to_string(doc.m);
    out += ",\"n\":";
    out += std::to_string(doc.n);
    out += ",\"J\":";
    out += std::to_string(doc.J);
    out += ",\"members\":[";
    for (size_t j = 0; j < doc.members.size(); ++j) {
        if (j) out += ',';
        const MemberDocument& md = doc.members[j];
        out += "{\"P\":";
        emit_blocks(out, md.P);
        out += ",\"Lambda\":";
        emit_blocks(out, md.Lambda);
        out += ",\"v\":";
        emit_real_array(out, md.v);
        out += '}';
    }
    out += "],\"C\":";
    emit_blocks(out, doc.C);
    out += ",\"C_prime\":";
    emit_blocks(out, doc.C_prime);
    if (doc.K) {
        out += ",\"K\":";
        emit_blocks(out, *doc.K);
    }
    out += ",\"metadata\":{";
    bool first = true;
    if (doc.metadata.seed) {
        out += "\"seed\":";
        out += std::to_string(*doc.metadata.seed);
        first = false;
    }
    if (doc.metadata.mode) {
        if (!first) out += ',';
        out += "\"mode\":";
        emit_string(out, *doc.metadata.mode);
        first = false;
    }
    if (doc.metadata.created) {
        if (!first) out += ',';
        out += "\"created\":";
        emit_string(out, *doc.metadata.created);
    }
    out += "}}\n";
    return out;
}

InstanceDocument parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed document: ") + e.what());
    }
    if (!j.is_object()) bad("top level must be an object");

    InstanceDocument doc;
    doc.schema_version = int_from(field(j, "schema_version"), "schema_version");
    if (doc.schema_version != 1) bad("unsupported schema_version");
    doc.m = int_from(field(j, "m"), "m");
    doc.n = int_from(field(j, "n"), "n");
    doc.J = int_from(field(j, "J"), "J");
    if (doc.m < 1 || doc.n < 1 || doc.J < 1) bad("m, n and J must be positive");

    const json& members = field(j, "members");
    if (!members.is_array() || static_cast<int>(members.size()) != doc.J)
        bad("members must list exactly J entries");
    for (const json& mj : members) {
        if (!mj.is_object()) bad("member must be an object");
        MemberDocument md;
        md.P = blocks_from(field(mj, "P"), doc.m, "P");
        require_square(md.P, doc.n, "P");
        md.Lambda = blocks_from(field(mj, "Lambda"), doc.m, "Lambda");
        const Eigen::Index nj = md.Lambda.front().rows();
        for (const auto& bl : md.Lambda)
            if (bl.rows() != nj || bl.cols() != doc.n)
                bad("Lambda blocks must share one n_j x n shape");
        const json& vj = field(mj, "v");
        if (!vj.is_array() || static_cast<int>(vj.size()) != doc.m)
            bad("v must be a length-m real array");
        for (const json& w : vj) md.v.push_back(real_from(w, "v"));
        doc.members.push_back(std::move(md));
    }

    doc.C = blocks_from(field(j, "C"), doc.m, "C");
    require_square(doc.C, doc.n, "C");
    doc.C_prime = blocks_from(field(j, "C_prime"), doc.m, "C_prime");
    require_square(doc.C_prime, doc.n, "C_prime");
    if (j.contains("K")) {
        doc.K = blocks_from(j["K"], doc.m, "K");
        require_square(*doc.K, doc.n, "K");
    }
    if (j.contains("metadata")) {
        const json& md = j["metadata"];
        if (!md.is_object()) bad("metadata must be an object");
        if (md.contains("seed")) {
            if (!md["seed"].is_number_integer()) bad("metadata.seed must be an integer");
            doc.metadata.seed = md["seed"].get<uint64_t>();
        }
        if (md.contains("mode")) {
            if (!md["mode"].is_string()) bad("metadata.mode must be a string");
            doc.metadata.mode = md["mode"].get<std::string>();
        }
        if (md.contains("created")) {
            if (!md["created"].is_string()) bad("metadata.created must be a string");
            doc.metadata.created = md["created"].get<std::string>();
        }
    }
    return doc;
}

void save_instance(const std::string& path, const InstanceDocument& doc) {
    write_text_file(path, to_json(doc));
}

InstanceDocument load_instance(const std::string& path) {
    return parse_instance(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Operator documents
// ---------------------------------------------------------------------------

std::string operator_to_json(const AdjointableOp& T) {
    std::string out;
    out += "{\"schema_version\":1,\"kind\":\"operator\",\"m\":";
    out += std::to_string(T.slot_count());
    out += ",\"p\":";
    out += std::to_string(T.codomain_dim());
    out += ",\"n\":";
    out += std::to_string(T.domain_dim());
    out += ",\"blocks\":";
    std::vector<Eigen::MatrixXcd> blocks;
    for (int s = 0; s < T.slot_count(); ++s) blocks.push_back(T.block(s));
    emit_blocks(out, blocks);
    out += "}\n";
    return out;
}

AdjointableOp parse_operator(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed operator: ") + e.what());
    }
    if (!j.is_object()) bad("operator must be an object");
    const int m = int_from(field(j, "m"), "m");
    const int p = int_from(field(j, "p"), "p");
    const int n = int_from(field(j, "n"), "n");
    if (m < 1 || p < 1 || n < 1) bad("operator m, p and n must be positive");
    std::vector<Eigen::MatrixXcd> blocks = blocks_from(field(j, "blocks"), m, "blocks");
    for (const auto& bl : blocks)
        if (bl.rows() != p || bl.cols() != n) bad("operator blocks must be p x n");
    return AdjointableOp(std::move(blocks));
}

void save_operator(const std::string& path, const AdjointableOp& T) {
    write_text_file(path, operator_to_json(T));
}

AdjointableOp load_operator(const std::string& path) {
    return parse_operator(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Signal documents
// ---------------------------------------------------------------------------

std::string signal_to_json(const ModuleVector& f) {
    std::string out;
    out += "{\"schema_version\":1,\"kind\":\"signal\",\"m\":";
    out += std::to_string(f.slot_count());
    out += ",\"n\":";
    out += std::to_string(f.dim());
    out += ",\"slots\":[";
    for (int s = 0; s < f.slot_count(); ++s) {
        if (s) out += ',';
        out += '[';
        for (int i = 0; i < f.dim(); ++i) {
            if (i) out += ',';
            emit_complex(out, f.slot(s)(i));
        }
        out += ']';
    }
    out += "]}\n";
    return out;
}

ModuleVector parse_signal(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed signal: ") + e.what());
    }
    if (!j.is_object()) bad("signal must be an object");
    const int m = int_from(field(j, "m"), "m");
    const int n = int_from(field(j, "n"), "n");
    if (m < 1 || n < 1) bad("signal m and n must be positive");
    const json& slots = field(j, "slots");
    if (!slots.is_array() || static_cast<int>(slots.size()) != m)
        bad("slots must list one entry array per slot");
    std::vector<Eigen::VectorXcd> data(m, Eigen::VectorXcd::Zero(n));
    for (int s = 0; s < m; ++s) {
        const json& row = slots[s];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            bad("each slot must hold exactly n entries");
        for (int i = 0; i < n; ++i) data[s](i) = complex_from(row[i], "signal entry");
    }
    return ModuleVector(std::move(data));
}

void save_signal(const std::string& path, const ModuleVector& f) {
    write_text_file(path, signal_to_json(f));
}

ModuleVector load_signal(const std::string& path) { return parse_signal(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

std::string to_json(const FrameAssessment& a) {
    std::string out = "{\"schema_version\":1,\"kind\":\"assessment\",\"assessment\":";
    emit_assessment_body(out, a);
    out += "}\n";
    return out;
}

std::string to_json(const CheckResult& r) {
    std::string out = "{\"schema_version\":1,\"kind\":\"check\",\"assessment\":";
    emit_assessment_body(out, r.assessment);
    out += ",\"oracle\":{\"A_oracle\":";
    emit_real(out, r.oracle.A_oracle);
    out += ",\"B_oracle\":";
    emit_real(out, r.oracle.B_oracle);
    out += '}';
    if (r.k_bisection) {
        out += ",\"k_bisection\":";
        emit_real(out, *r.k_bisection);
    }
    out += ",\"oracle_agrees\":";
    out += r.oracle_agrees ? "true" : "false";
    out += ",\"k_agrees\":";
    out += r.k_agrees ? "true" : "false";
    out += "}\n";
    return out;
}

std::string to_json(const oracle::OracleReport& r) {
    std::string out = "{\"schema_version\":1,\"kind\":\"oracle\",\"A_oracle\":";
    emit_real(out, r.A_oracle);
    out += ",\"B_oracle\":";
    emit_real(out, r.B_oracle);
    out += ",\"per_slot\":[";
    for (size_t s = 0; s < r.per_slot.size(); ++s) {
        if (s) out += ',';
        out += "{\"lambda_min\":";
        emit_real(out, r.per_slot[s].lambda_min);
        out += ",\"lambda_max\":";
        emit_real(out, r.per_slot[s].lambda_max);
        out += '}';
    }
    out += "]}\n";
    return out;
}

std::string to_json(const SolveReport& r) {
    std::string out = "{\"schema_version\":1,\"kind\":\"solve\",\"method\":";
    out += r.method == SolveMethod::richardson ? "\"richardson\"" : "\"cg\"";
    out += ",\"iterations\":";
    out += std::to_string(r.iterations);
    out += ",\"contraction_observed\":";
    emit_real(out, r.contraction_observed);
    out += ",\"bound_ratio\":";
    emit_real(out, r.bound_ratio);
    out += ",\"rel_error\":";
    emit_real(out, r.rel_error);
    out += ",\"residual_history\":";
    emit_real_array(out, r.residual_history);
    out += "}\n";
    return out;
}

std::string to_json(const TransformResult& r) {
    std::string out = "{\"schema_version\":1,\"kind\":\"transform\",\"formula_id\":";
    emit_string(out, r.predicted.formula_id);
    out += ",\"A_pred\":";
    emit_real(out, r.predicted.A_pred);
    out += ",\"B_pred\":";
    emit_real(out, r.predicted.B_pred);
    if (r.identity_residual) {
        out += ",\"identity_residual\":";
        emit_real(out, *r.identity_residual);
    }
    out += ",\"measured\":";
    emit_assessment_body(out, r.measured);
    out += "}\n";
    return out;
}

std::string to_json(const PerturbationReport& r) {
    std::string out = "{\"schema_version\":1,\"kind\":\"perturbation\",\"lambda1\":";
    emit_real(out, r.lambda1);
    out += ",\"lambda2\":";
    emit_real(out, r.lambda2);
    out += ",\"epsilon\":";
    emit_real(out, r.epsilon);
    out += ",\"certificate\":";
    out += r.hypothesis.certificate ? "true" : "false";
    out += ",\"falsified_by_sample\":";
    out += r.hypothesis.falsified_by_sample ? "true" : "false";
    out += ",\"worst_sample_gap\":";
    emit_real(out, r.hypothesis.worst_sample_gap);
    out += ",\"gate_ok\":";
    out += r.gate_ok ? "true" : "false";
    out += ",\"verdict\":";
    switch (r.verdict) {
        case PerturbationVerdict::certified: out += "\"certified\""; break;
        case PerturbationVerdict::inconclusive: out += "\"inconclusive\""; break;
        case PerturbationVerdict::falsified: out += "\"falsified\""; break;
    }
    out += ",\"predicted_lower\":";
    emit_real(out, r.predicted_lower);
    out += ",\"predicted_upper\":";
    emit_real(out, r.predicted_upper);
    out += ",\"measured\":";
    emit_assessment_body(out, r.measured);
    out += "}\n";
    return out;
}

std::string to_json(const std::vector<TheoremRun>& runs) {
    int passed = 0;
    for (const TheoremRun& r : runs) passed += r.pass ? 1 : 0;
    std::string out = "{\"schema_version\":1,\"kind\":\"theorem_suite\",\"passed\":";
    out += std::to_string(passed);
    out += ",\"total\":";
    out += std::to_string(static_cast<int>(runs.size()));
    out += ",\"runs\":[";
    for (size_t i = 0; i < runs.size(); ++i) {
        if (i) out += ',';
        out += "{\"name\":";
        emit_string(out, runs[i].name);
        out += ",\"pass\":";
        out += runs[i].pass ? "true" : "false";
        out += ",\"detail\":";
        emit_string(out, runs[i].detail);
        out += '}';
    }
    out += "]}\n";
    return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) throw IoError("read failed: " + path);
    return ss.str();
}

}  // namespace ccgf::io
