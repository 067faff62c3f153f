#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ccgf/io.hpp"

using namespace ccgf;
namespace fs = std::filesystem;

namespace {

Eigen::MatrixXcd diag2(double a, double b) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2, 2);
    M(0, 0) = a;
    M(1, 1) = b;
    return M;
}

fs::path fixture_dir() {
    fs::path dir = fs::current_path() / "cli_fixtures";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(CCGF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("instance documents re-emit byte-identically after parsing") {
    RandomInstance inst = gen_random(11, 2, 3, 3, GenMode::diagonal, 4.0);
    io::InstanceMetadata meta;
    meta.seed = 11;
    meta.mode = "diagonal";
    io::InstanceDocument doc =
        io::make_document(inst.system, inst.controllers, inst.K, meta);

    std::string text = io::to_json(doc);
    CHECK(!text.empty());
    CHECK(text.back() == '\n');
    io::InstanceDocument back = io::parse_instance(text);
    CHECK(io::to_json(back) == text);

    fs::path p = fixture_dir() / "roundtrip.json";
    io::save_instance(p.string(), doc);
    io::InstanceDocument loaded = io::load_instance(p.string());
    CHECK(io::to_json(loaded) == text);

    io::LoadedInstance live = io::realize(loaded);
    CHECK(live.system.member_count() == 3);
    CHECK(live.K.has_value());
    CHECK(live.metadata.seed == 11);
    FrameAssessment a0 = assess_controlled(inst.system, inst.controllers);
    FrameAssessment a1 = assess_controlled(live.system, live.controllers);
    CHECK(a1.A_opt == doctest::Approx(a0.A_opt).epsilon(1e-12));
    CHECK(a1.B_opt == doctest::Approx(a0.B_opt).epsilon(1e-12));
}

TEST_CASE("reals serialize at full precision, including non-finite values") {
    CHECK(io::format_real(std::numeric_limits<double>::infinity()) == "\"inf\"");
    CHECK(io::format_real(-std::numeric_limits<double>::infinity()) == "\"-inf\"");
    CHECK(io::format_real(std::nan("")) == "\"nan\"");
    CHECK(io::format_real(0.1) == "0.10000000000000001");
    CHECK(io::format_real(1.0) == "1");
}

TEST_CASE("operator and signal documents round-trip") {
    AdjointableOp T({diag2(1.5, -0.25), diag2(3.0, 0.125)});
    std::string text = io::operator_to_json(T);
    AdjointableOp back = io::parse_operator(text);
    CHECK((T - back).norm() == 0.0);
    CHECK(io::operator_to_json(back) == text);

    ModuleVector f(2, 3);
    f.slot(0) << Complex(1, 2), Complex(0.5, 0), Complex(0, -0.125);
    f.slot(1) << Complex(-1, 0), Complex(2, 2), Complex(0.0625, 0);
    std::string sig = io::signal_to_json(f);
    ModuleVector g = io::parse_signal(sig);
    CHECK((f - g).norm() == 0.0);
    CHECK(io::signal_to_json(g) == sig);

    fs::path op_path = fixture_dir() / "op.json";
    fs::path sig_path = fixture_dir() / "sig.json";
    io::save_operator(op_path.string(), T);
    io::save_signal(sig_path.string(), f);
    CHECK((io::load_operator(op_path.string()) - T).norm() == 0.0);
    CHECK((io::load_signal(sig_path.string()) - f).norm() == 0.0);
}

TEST_CASE("malformed documents raise IO failures, not crashes") {
    CHECK_THROWS_AS(io::parse_instance("{not json"), IoError);
    CHECK_THROWS_AS(io::parse_instance("[1,2,3]\n"), IoError);
    CHECK_THROWS_AS(io::parse_instance("{\"schema_version\":1}\n"), IoError);
    CHECK_THROWS_AS(io::parse_operator("{\"kind\":\"signal\"}"), IoError);
    CHECK_THROWS_AS(io::parse_signal("{\"kind\":\"operator\"}"), IoError);
    CHECK_THROWS_AS(io::load_instance((fixture_dir() / "missing.json").string()), IoError);

    // schema_version is checked
    RandomInstance inst = gen_random(12, 1, 2, 2, GenMode::scalar_ctrl, 2.0);
    io::InstanceDocument doc = io::make_document(inst.system, inst.controllers, std::nullopt);
    std::string text = io::to_json(doc);
    auto j = nlohmann::json::parse(text);
    j["schema_version"] = 2;
    CHECK_THROWS_AS(io::parse_instance(j.dump()), IoError);
}

TEST_CASE("realizing a document applies the library validation") {
    io::InstanceDocument doc;
    doc.m = 1;
    doc.n = 2;
    doc.J = 1;
    io::MemberDocument md;
    md.P = {Eigen::MatrixXcd::Identity(2, 2)};
    md.Lambda = {Eigen::MatrixXcd::Identity(2, 2)};
    md.v = {0.0};  // weights must be strictly positive
    doc.members = {md};
    doc.C = {Eigen::MatrixXcd::Identity(2, 2)};
    doc.C_prime = {Eigen::MatrixXcd::Identity(2, 2)};
    CHECK_THROWS_AS(io::realize(doc), WeightError);

    doc.members[0].v = {1.0};
    doc.C = {diag2(-1.0, 1.0)};  // controllers must be positive invertible
    CHECK_THROWS_AS(io::realize(doc), PositivityError);
}

TEST_CASE("result documents parse as JSON with the advertised fields") {
    RandomInstance inst = gen_random(13, 2, 3, 3, GenMode::diagonal, 4.0);
    FrameAssessment as = assess_k_g_fusion(inst.system, inst.controllers, inst.K);
    std::string text = io::to_json(as);
    auto j = nlohmann::json::parse(text);
    CHECK(j["kind"] == "assessment");
    CHECK(j["assessment"]["is_frame"] == true);
    CHECK(j["assessment"]["A_opt"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(j["assessment"]["k_verdict"]["is_K_frame"].is_boolean());
    CHECK(j["assessment"]["per_slot"].size() == 2);
}

TEST_CASE("cli: deterministic generation and a passing check") {
    fs::path a = fixture_dir() / "gen_a.json";
    fs::path b = fixture_dir() / "gen_b.json";
    CHECK(run_cli("gen --seed 7 --m 2 --n 3 --J 3 --out " + a.string()) == 0);
    CHECK(run_cli("gen --seed 7 --m 2 --n 3 --J 3 --out " + b.string()) == 0);
    CHECK(io::read_text_file(a.string()) == io::read_text_file(b.string()));
    CHECK(run_cli("check --in " + a.string()) == 0);

    fs::path ex = fixture_dir() / "example.json";
    fs::path ex_check = fixture_dir() / "example_check.json";
    CHECK(run_cli("example --N 8 --out " + ex.string()) == 0);
    CHECK(run_cli("check --in " + ex.string() + " --json-out " + ex_check.string()) == 0);
    auto j = nlohmann::json::parse(io::read_text_file(ex_check.string()));
    CHECK(j["kind"] == "check");
    CHECK(j["oracle_agrees"] == true);
    CHECK(j["assessment"]["is_parseval"] == true);
}

TEST_CASE("cli: exit code 1 flags a mathematically negative verdict") {
    // A single projector that misses part of the space: no frame.
    io::InstanceDocument doc;
    doc.m = 1;
    doc.n = 3;
    doc.J = 1;
    io::MemberDocument md;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(3, 3);
    P(0, 0) = 1.0;
    P(1, 1) = 1.0;
    md.P = {P};
    md.Lambda = {P};
    md.v = {1.0};
    doc.members = {md};
    doc.C = {Eigen::MatrixXcd::Identity(3, 3)};
    doc.C_prime = {Eigen::MatrixXcd::Identity(3, 3)};
    fs::path p = fixture_dir() / "nonframe.json";
    io::save_instance(p.string(), doc);
    CHECK(run_cli("check --in " + p.string()) == 1);
}

TEST_CASE("cli: exit code 2 covers usage and unreadable input") {
    fs::path bad = fixture_dir() / "bad.json";
    io::write_text_file(bad.string(), "{this is not json\n");
    CHECK(run_cli("check --in " + bad.string()) == 2);
    CHECK(run_cli("") == 2);                  // a subcommand is required
    CHECK(run_cli("frobnicate") == 2);        // unknown subcommand
    CHECK(run_cli("gen --seed 1") == 2);      // missing required --out
    CHECK(run_cli("check --in " + (fixture_dir() / "absent.json").string()) == 2);
}

TEST_CASE("cli: exit code 3 rejects controllers that break the commutation premise") {
    io::InstanceDocument doc;
    doc.m = 1;
    doc.n = 2;
    doc.J = 1;
    io::MemberDocument md;
    md.P = {Eigen::MatrixXcd::Identity(2, 2)};
    md.Lambda = {diag2(1.0, 2.0)};
    md.v = {1.0};
    doc.members = {md};
    Eigen::MatrixXcd C(2, 2);
    C << 2.0, 1.0, 1.0, 2.0;  // positive, but does not commute with diag(1,4)
    doc.C = {C};
    doc.C_prime = {Eigen::MatrixXcd::Identity(2, 2)};
    fs::path p = fixture_dir() / "noncommuting.json";
    io::save_instance(p.string(), doc);
    CHECK(run_cli("check --in " + p.string()) == 3);
}

TEST_CASE("cli: reconstruction and theorem suite succeed end to end") {
    fs::path inst = fixture_dir() / "solver_inst.json";
    CHECK(run_cli("gen --seed 21 --m 1 --n 4 --J 3 --spread 3 --out " + inst.string()) == 0);

    ModuleVector f(1, 4);
    f.slot(0) << Complex(1, 0), Complex(0, 1), Complex(-0.5, 0.25), Complex(2, 0);
    fs::path sig = fixture_dir() / "solver_sig.json";
    io::save_signal(sig.string(), f);

    fs::path rep = fixture_dir() / "solve_rep.json";
    CHECK(run_cli("reconstruct --in " + inst.string() + " --signal " + sig.string() +
                  " --method cg --json-out " + rep.string()) == 0);
    auto j = nlohmann::json::parse(io::read_text_file(rep.string()));
    CHECK(j["kind"] == "solve");
    CHECK(j["method"] == "cg");
    CHECK(j["rel_error"].get<double>() <= 1e-8);

    CHECK(run_cli("theorems --seed 3") == 0);
}
