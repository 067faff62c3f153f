#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccgf/constructions.hpp"
#include "ccgf/oracle.hpp"
#include "ccgf/solver.hpp"
#include "ccgf/suite.hpp"

namespace ccgf::io {

/**
 * Document layer. Writing is hand-canonicalized: fixed key order, no
 * whitespace, floats at 17 significant digits (%.17g, exact double
 * round-trip), complex numbers as [re, im], matrices as per-slot lists of
 * row-major rows, one trailing newline. save -> load -> save is therefore
 * byte-identical. Infinite reals (the vacuous K-bound) serialize as the
 * string "inf". Parsing accepts any JSON layout of the documented shape.
 */

struct MemberDocument {
    std::vector<Eigen::MatrixXcd> P;       // m blocks, n x n
    std::vector<Eigen::MatrixXcd> Lambda;  // m blocks, n_j x n
    std::vector<double> v;                 // length m, positive
};

struct InstanceMetadata {
    std::optional<uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> created;
};

struct InstanceDocument {
    int schema_version = 1;
    int m = 0;
    int n = 0;
    int J = 0;
    std::vector<MemberDocument> members;
    std::vector<Eigen::MatrixXcd> C;
    std::vector<Eigen::MatrixXcd> C_prime;
    std::optional<std::vector<Eigen::MatrixXcd>> K;
    InstanceMetadata metadata;
};

/// An InstanceDocument realized into validated computational objects.
struct LoadedInstance {
    GFusionSystem system;
    ControllerPair controllers;
    std::optional<AdjointableOp> K;
    InstanceMetadata metadata;
};

InstanceDocument make_document(const GFusionSystem& sys, const ControllerPair& ctrl,
                               const std::optional<AdjointableOp>& K,
                               InstanceMetadata metadata = {});

/// Rebuilds the system (shape and weight validation), the controller pair
/// (positivity + commutation validation) and K from a parsed document.
/// Library validation errors propagate; structural mismatches are IoError.
LoadedInstance realize(const InstanceDocument& doc);

std::string to_json(const InstanceDocument& doc);
InstanceDocument parse_instance(const std::string& text);  // IoError on malformed input
void save_instance(const std::string& path, const InstanceDocument& doc);
InstanceDocument load_instance(const std::string& path);

/// Operator documents: {"schema_version":1,"kind":"operator","m":..,"p":..,
/// "n":..,"blocks":[per-slot p x n matrices]}.
std::string operator_to_json(const AdjointableOp& T);
AdjointableOp parse_operator(const std::string& text);
void save_operator(const std::string& path, const AdjointableOp& T);
AdjointableOp load_operator(const std::string& path);

/// Signal documents: {"schema_version":1,"kind":"signal","m":..,"n":..,
/// "slots":[[ [re,im], ... ] per slot]}.
std::string signal_to_json(const ModuleVector& f);
ModuleVector parse_signal(const std::string& text);
void save_signal(const std::string& path, const ModuleVector& f);
ModuleVector load_signal(const std::string& path);

/// Everything the `check` subcommand reports: the main-path assessment
/// (k_verdict set when a lower operator was assessed), the independent
/// oracle recomputation, the bisection cross-check of the K-bound, and the
/// agreement verdicts.
struct CheckResult {
    FrameAssessment assessment;
    oracle::OracleReport oracle;
    std::optional<double> k_bisection;
    bool oracle_agrees = false;
    bool k_agrees = true;
};

// Result documents (canonical bytes; shapes documented in the README).
std::string to_json(const CheckResult& r);
std::string to_json(const FrameAssessment& a);
std::string to_json(const oracle::OracleReport& r);
std::string to_json(const SolveReport& r);
std::string to_json(const TransformResult& r);
std::string to_json(const PerturbationReport& r);
std::string to_json(const std::vector<TheoremRun>& runs);

/// One canonical real: %.17g, or the strings "inf"/"-inf"/"nan".
std::string format_real(double x);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ccgf::io
