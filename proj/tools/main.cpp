// Command-line workbench for controlled g-fusion frames: generate instances,
// assess frame properties with an independent oracle cross-check, reconstruct
// signals, sweep the theorem suite, and run perturbation-stability checks.
//
// Exit codes:
//   0  all checks pass
//   1  mathematical verdict negative (valid run; a frame property fails,
//      an iteration fails to converge, or a suite entry fails)
//   2  usage or input error (bad flags, unreadable/malformed documents,
//      dimension or parameter mismatches)
//   3  hypothesis/validation error (positivity, weights, commutation,
//      invertibility, theorem hypotheses, solver preconditions)

#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccgf/io.hpp"

namespace {

using namespace ccgf;

constexpr double kOracleAgreeTol = 1e-9;   // |bound - oracle| <= tol * max(1, bound)
constexpr double kBisectAgreeTol = 1e-6;   // |A_K closed form - bisection|
constexpr double kPredictionSlack = 1e-8;  // relative slack on theorem predictions

std::string fmt(double x) { return io::format_real(x); }

bool close_to(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b) && a == b;
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct GenArgs {
    uint64_t seed = 1;
    int m = 2, n = 4, J = 4;
    std::string mode = "diagonal";
    double spread = 10.0;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    GenMode mode = a.mode == "scalar_ctrl" ? GenMode::scalar_ctrl : GenMode::diagonal;
    RandomInstance inst = gen_random(a.seed, a.m, a.n, a.J, mode, a.spread);
    io::InstanceMetadata meta;
    meta.seed = a.seed;
    meta.mode = a.mode;
    io::save_instance(a.out, io::make_document(inst.system, inst.controllers, inst.K, meta));
    std::cout << "wrote " << a.out << " (m=" << a.m << ", n=" << a.n << ", J=" << a.J
              << ", mode=" << a.mode << ", spread=" << fmt(a.spread) << ")\n";
    return 0;
}

struct ExampleArgs {
    int N = 64;
    int m = 1;
    double cscale = 2.0;
    double cpscale = 0.5;
    std::string out;
};

int cmd_example(const ExampleArgs& a) {
    auto [sys, ctrl] = gen_paper_example(a.N, a.m, a.cscale, a.cpscale);
    io::InstanceMetadata meta;
    meta.mode = "example";
    io::save_instance(a.out, io::make_document(sys, ctrl, std::nullopt, meta));
    std::cout << "wrote " << a.out << " (N=" << a.N << ", m=" << a.m << ", C=" << fmt(a.cscale)
              << "*I, C'=" << fmt(a.cpscale) << "*I)\n";
    return 0;
}

struct CheckArgs {
    std::string in;
    std::string k_path;
    std::string json_out;
};

int cmd_check(const CheckArgs& a) {
    io::LoadedInstance L = io::realize(io::load_instance(a.in));

    std::optional<AdjointableOp> K = L.K;
    if (!a.k_path.empty()) K = io::load_operator(a.k_path);

    io::CheckResult result{K ? assess_k_g_fusion(L.system, L.controllers, *K)
                             : assess_controlled(L.system, L.controllers),
                           oracle::slotwise_bounds(L.system, L.controllers),
                           std::nullopt,
                           false,
                           true};
    result.oracle_agrees =
        close_to(result.assessment.A_opt, result.oracle.A_oracle, kOracleAgreeTol) &&
        close_to(result.assessment.B_opt, result.oracle.B_oracle, kOracleAgreeTol);
    if (K) {
        result.k_bisection = oracle::k_bound_bisection(L.system, L.controllers, *K);
        result.k_agrees =
            close_to(result.assessment.k_verdict->A_K, *result.k_bisection, kBisectAgreeTol);
    }

    const FrameAssessment& as = result.assessment;
    std::cout << "A_opt = " << fmt(as.A_opt) << "\nB_opt = " << fmt(as.B_opt)
              << "\nframe: " << (as.is_frame ? "yes" : "no")
              << "  tight: " << (as.is_tight ? "yes" : "no")
              << "  parseval: " << (as.is_parseval ? "yes" : "no") << "\noracle: A = "
              << fmt(result.oracle.A_oracle) << ", B = " << fmt(result.oracle.B_oracle)
              << "  (agrees: " << (result.oracle_agrees ? "yes" : "no") << ")\n";
    if (K) {
        std::cout << "A_K = " << fmt(as.k_verdict->A_K) << "  (bisection "
                  << fmt(*result.k_bisection)
                  << ", agrees: " << (result.k_agrees ? "yes" : "no")
                  << ")\nK-frame: " << (as.k_verdict->is_K_frame ? "yes" : "no") << "\n";
    }
    if (!a.json_out.empty()) io::write_text_file(a.json_out, io::to_json(result));

    bool pass = as.is_frame && result.oracle_agrees && result.k_agrees &&
                (!K || as.k_verdict->is_K_frame);
    return pass ? 0 : 1;
}

struct ReconstructArgs {
    std::string in;
    std::string signal;
    std::string method = "richardson";
    double tol = 1e-8;
    std::string json_out;
};

void print_solve(const SolveReport& rep, double round_trip) {
    std::cout << "method: " << (rep.method == SolveMethod::richardson ? "richardson" : "cg")
              << "\niterations: " << rep.iterations << "\nfinal residual: " << fmt(rep.rel_error)
              << "\ncontraction observed: " << fmt(rep.contraction_observed)
              << "  bound ratio: " << fmt(rep.bound_ratio)
              << "\nround-trip error: " << fmt(round_trip) << "\n";
}

int cmd_reconstruct(const ReconstructArgs& a) {
    io::LoadedInstance L = io::realize(io::load_instance(a.in));
    ModuleVector f = io::load_signal(a.signal);
    SolveMethod method = a.method == "cg" ? SolveMethod::cg : SolveMethod::richardson;
    CoefficientFamily coeffs = analysis_apply(L.system, L.controllers, f);
    try {
        auto [x, rep] = reconstruct(L.system, L.controllers, coeffs, method, a.tol);
        double fn = f.norm();
        double round_trip = (x - f).norm() / std::max(fn, 1e-300);
        print_solve(rep, round_trip);
        if (!a.json_out.empty()) io::write_text_file(a.json_out, io::to_json(rep));
        return 0;
    } catch (const SolveFailure& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        if (!a.json_out.empty()) io::write_text_file(a.json_out, io::to_json(e.report));
        return 1;
    }
}

struct TheoremsArgs {
    uint64_t seed = 1;
    int count = 1;
    std::string json_out;
};

int cmd_theorems(const TheoremsArgs& a) {
    if (a.count < 1) throw ParamError("--count must be at least 1");
    std::vector<TheoremRun> all;
    std::map<std::string, std::pair<int, int>> table;  // name -> (passes, total)
    std::vector<std::string> order;
    for (int i = 0; i < a.count; ++i) {
        for (TheoremRun& run : run_theorem_suite(a.seed + static_cast<uint64_t>(i))) {
            auto it = table.find(run.name);
            if (it == table.end()) {
                order.push_back(run.name);
                it = table.emplace(run.name, std::make_pair(0, 0)).first;
            }
            it->second.first += run.pass ? 1 : 0;
            it->second.second += 1;
            if (!run.pass)
                std::cerr << "fail seed=" << a.seed + static_cast<uint64_t>(i) << " "
                          << run.name << ": " << run.detail << "\n";
            all.push_back(std::move(run));
        }
    }
    int passed = 0;
    for (const TheoremRun& r : all) passed += r.pass ? 1 : 0;
    for (const std::string& name : order) {
        const auto& [p, t] = table.at(name);
        std::cout << name;
        for (size_t pad = name.size(); pad < 28; ++pad) std::cout << ' ';
        std::cout << p << "/" << t << "\n";
    }
    std::cout << "total";
    for (size_t pad = 5; pad < 28; ++pad) std::cout << ' ';
    std::cout << passed << "/" << all.size() << "\n";
    if (!a.json_out.empty()) io::write_text_file(a.json_out, io::to_json(all));
    return passed == static_cast<int>(all.size()) ? 0 : 1;
}

struct PerturbArgs {
    std::string in;
    std::string in2;
    double lambda1 = 0.1;
    double lambda2 = 0.1;
    double epsilon = 0.0;
    int samples = 64;
    std::string json_out;
};

int cmd_perturb(const PerturbArgs& a) {
    io::LoadedInstance L1 = io::realize(io::load_instance(a.in));
    io::LoadedInstance L2 = io::realize(io::load_instance(a.in2));
    if (!L1.K) throw ParamError("perturb: the first instance must carry K");
    PerturbationReport rep =
        perturbation_check(L1.system, L2.system, L1.controllers, *L1.K, a.lambda1, a.lambda2,
                           a.epsilon, a.samples);

    const char* verdict = rep.verdict == PerturbationVerdict::certified     ? "certified"
                          : rep.verdict == PerturbationVerdict::inconclusive ? "inconclusive"
                                                                              : "falsified";
    std::cout << "hypothesis certificate: " << (rep.hypothesis.certificate ? "yes" : "no")
              << "  falsified by sample: " << (rep.hypothesis.falsified_by_sample ? "yes" : "no")
              << "\ngate epsilon < (1 - lambda1) sqrt(A): " << (rep.gate_ok ? "yes" : "no")
              << "\nverdict: " << verdict << "\n";
    bool bounds_ok = true;
    if (rep.verdict == PerturbationVerdict::certified) {
        double measured_lower = rep.measured.k_verdict->A_K;
        bounds_ok = measured_lower >=
                        rep.predicted_lower -
                            kPredictionSlack * std::max(1.0, std::abs(rep.predicted_lower)) &&
                    rep.measured.B_opt <=
                        rep.predicted_upper +
                            kPredictionSlack * std::max(1.0, std::abs(rep.predicted_upper));
        std::cout << "predicted interval: [" << fmt(rep.predicted_lower) << ", "
                  << fmt(rep.predicted_upper) << "]\nmeasured: A_K = " << fmt(measured_lower)
                  << ", B_opt = " << fmt(rep.measured.B_opt)
                  << "  (within prediction: " << (bounds_ok ? "yes" : "no") << ")\n";
    }
    if (!a.json_out.empty()) io::write_text_file(a.json_out, io::to_json(rep));
    return rep.verdict == PerturbationVerdict::certified && bounds_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"controlled g-fusion frame workbench"};
    app.require_subcommand(1);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a deterministic random instance");
    gen->add_option("--seed", gen_args.seed, "rng seed")->required();
    gen->add_option("--m", gen_args.m, "algebra dimension (slots)");
    gen->add_option("--n", gen_args.n, "module dimension");
    gen->add_option("--J", gen_args.J, "number of members");
    gen->add_option("--mode", gen_args.mode, "scalar_ctrl | diagonal")
        ->check(CLI::IsMember({"scalar_ctrl", "diagonal"}));
    gen->add_option("--spread", gen_args.spread, "conditioning dial (>= 1)");
    gen->add_option("--out", gen_args.out, "output instance file")->required();

    ExampleArgs ex_args;
    CLI::App* example = app.add_subcommand("example", "emit the analytic Parseval example");
    example->add_option("--N", ex_args.N, "truncation dimension");
    example->add_option("--m", ex_args.m, "algebra dimension (slots)");
    example->add_option("--cscale", ex_args.cscale, "C = cscale * I");
    example->add_option("--cpscale", ex_args.cpscale, "C' = cpscale * I");
    example->add_option("--out", ex_args.out, "output instance file")->required();

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "assess an instance with oracle cross-check");
    check->add_option("--in", check_args.in, "instance file")->required();
    check->add_option("--K", check_args.k_path, "operator file for a K-frame assessment");
    check->add_option("--json-out", check_args.json_out, "write the result document here");

    ReconstructArgs rec_args;
    CLI::App* rec = app.add_subcommand("reconstruct", "invert the frame operator on a signal");
    rec->add_option("--in", rec_args.in, "instance file")->required();
    rec->add_option("--signal", rec_args.signal, "signal file")->required();
    rec->add_option("--method", rec_args.method, "richardson | cg")
        ->check(CLI::IsMember({"richardson", "cg"}));
    rec->add_option("--tol", rec_args.tol, "relative residual target");
    rec->add_option("--json-out", rec_args.json_out, "write the solve report here");

    TheoremsArgs thm_args;
    CLI::App* thm = app.add_subcommand("theorems", "run the constructive-theorem suite");
    thm->add_option("--seed", thm_args.seed, "base seed");
    thm->add_option("--count", thm_args.count, "number of seeded sweeps");
    thm->add_option("--json-out", thm_args.json_out, "write the suite document here");

    PerturbArgs pert_args;
    CLI::App* pert = app.add_subcommand("perturb", "perturbation-stability check of two families");
    pert->add_option("--in", pert_args.in, "reference instance (must carry K)")->required();
    pert->add_option("--in2", pert_args.in2, "perturbed instance")->required();
    pert->add_option("--lambda1", pert_args.lambda1, "mixing weight on the reference family");
    pert->add_option("--lambda2", pert_args.lambda2, "mixing weight on the perturbed family");
    pert->add_option("--epsilon", pert_args.epsilon, "additive slack");
    pert->add_option("--samples", pert_args.samples, "falsification sample count");
    pert->add_option("--json-out", pert_args.json_out, "write the perturbation report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_args);
        if (example->parsed()) return cmd_example(ex_args);
        if (check->parsed()) return cmd_check(check_args);
        if (rec->parsed()) return cmd_reconstruct(rec_args);
        if (thm->parsed()) return cmd_theorems(thm_args);
        if (pert->parsed()) return cmd_perturb(pert_args);
    } catch (const IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ParamError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
