// curvlab: build model operators, run computations and verification checks.
//
// Exit codes: 0 pass, 1 violation or failed check, 2 usage / input error,
// 3 inconclusive.

#include "curvlab/cones.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/invariance_lab.hpp"
#include "curvlab/io.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/quadratic_flow.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curvlab;

namespace {

enum Exit { ok = 0, failed = 1, usage = 2, inconclusive = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::pass: return ok;
        case Verdict::fail:
        case Verdict::violation: return failed;
        case Verdict::inconclusive: return inconclusive;
    }
    return failed;
}

struct RunConfig {
    std::uint64_t seed = 0;
    int dim = 4;
    int trials = 200;
    int samples = 500;
    int budget = 10000;
    std::string cone = "scal";
    std::string base = "nno";
    double epsilon = 0.1;
    double t_max = 0.9;
    double step = 1e-3;
    std::string out;
    Tolerances tol;

    json to_json(const std::string& check) const {
        json j;
        j["check"] = check;
        j["seed"] = seed;
        j["dim"] = dim;
        j["trials"] = trials;
        j["samples"] = samples;
        j["budget"] = budget;
        j["cone"] = cone;
        j["base"] = base;
        j["epsilon"] = epsilon;
        j["t_max"] = t_max;
        j["step"] = step;
        j["tolerances"] = tol.as_map();
        return j;
    }
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text_atomic(out, text);
    }
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    const std::string ext = p.has_extension() ? p.extension().string() : ".json";
    p.replace_extension();
    p += suffix + ext;
    return p;
}

double lambda_min(const CurvatureOperator& r) {
    if (r.dim() == 0) return 0.0;
    return Eigen::SelfAdjointEigenSolver<Matrix>(r.mat(), Eigen::EigenvaluesOnly).eigenvalues()[0];
}

// --- model -----------------------------------------------------------------

struct ModelArgs {
    std::string name;
    ModelParams params;
    std::string out;
};

int run_model(const ModelArgs& a) {
    const auto& names = model_names();
    if (std::find(names.begin(), names.end(), a.name) == names.end()) {
        throw UsageError("unknown model '" + a.name + "'");
    }
    CurvatureOperator r = CurvatureOperator::zero(1);
    try {
        r = make_model(a.name, a.params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const UnsupportedError& e) {
        throw UsageError(e.what());
    }
    const std::string out = a.out.empty() ? a.name + "_" + std::to_string(a.params.dim) + ".json" : a.out;
    emit(out, operator_to_json(r));
    const EinsteinFit fit = einstein_constant(r);
    std::cout << a.name << " n=" << r.n() << " scalar=" << scalar(r) << " einstein_residual=" << fit.residual
              << " lambda_min=" << lambda_min(r) << " -> " << out << "\n";
    return ok;
}

// --- compute ---------------------------------------------------------------

struct ComputeArgs {
    std::string op;
    std::string input;
    std::string out;
    double bianchi_tol = 1e-10;
};

int run_compute(const ComputeArgs& a) {
    LoadedOperator in = read_operator_file(a.input);
    const double scale = std::max(1.0, in.op.norm());
    if (in.bianchi_residual > a.bianchi_tol * scale || in.asymmetry > a.bianchi_tol * scale) {
        std::cerr << "warning: " << a.input << " violates the first Bianchi identity or symmetry (residual "
                  << std::max(in.bianchi_residual, in.asymmetry) << "); using its projection\n";
    }
    const CurvatureOperator& r = in.op;
    const std::string out = a.out.empty() ? a.op + ".json" : a.out;
    if (a.op == "q") {
        emit(out, operator_to_json(quadratic_term(r)));
    } else if (a.op == "sharp") {
        emit(out, operator_to_json(sharp(r)));
    } else if (a.op == "ricci") {
        const SymTensor2 ric = ricci(r);
        json j;
        j["n"] = r.n();
        j["ricci"] = json::array();
        for (int i = 0; i < ric.n(); ++i) {
            json row = json::array();
            for (int k = 0; k < ric.n(); ++k) row.push_back(ric.mat(i, k));
            j["ricci"].push_back(row);
        }
        j["scalar"] = scalar(r);
        emit(out, j.dump(2) + "\n");
    } else if (a.op == "decompose") {
        const Decomposition d = decompose(r);
        const CurvatureOperator sum = d.r_id + d.r_0 + d.r_w;
        const fs::path base = out;
        write_operator_file(with_suffix(base, "_id"), d.r_id);
        write_operator_file(with_suffix(base, "_ric0"), d.r_0);
        write_operator_file(with_suffix(base, "_weyl"), d.r_w);
        std::cout << "norm_id=" << d.r_id.norm() << " norm_ric0=" << d.r_0.norm() << " norm_weyl=" << d.r_w.norm()
                  << " reconstruction_residual=" << (sum - r).norm() << "\n";
        return ok;
    } else {
        throw UsageError("unknown computation '" + a.op + "'");
    }
    std::cout << a.op << " n=" << r.n() << " bianchi_residual_in=" << in.bianchi_residual << " -> " << out << "\n";
    return ok;
}

// --- evolve ----------------------------------------------------------------

struct EvolveArgs {
    std::string input;
    double t_end = 0.1;
    double step = 1e-3;
    std::string out;
};

int run_evolve(const EvolveArgs& a) {
    if (!(a.t_end > 0.0) || !(a.step > 0.0)) throw UsageError("--t-end and --step must be positive");
    const LoadedOperator in = read_operator_file(a.input);
    const OdeResult run = ode_evolve(in.op, a.t_end, a.step);
    std::ostringstream csv;
    write_trajectory_csv(csv, run.trajectory);
    emit(a.out, csv.str());
    std::cerr << "status=" << to_string(run.status) << " t=" << run.last_time() << "\n";
    return run.status == OdeStatus::drift ? failed : ok;
}

// --- verify ----------------------------------------------------------------

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{
        "bohm-wilking",   "ric0-weyl-pairing", "q-product",      "dim4-formula",
        "ode-closed-form", "dim4-cone",        "pic-witness",    "einstein-combination",
        "trace-identity", "invariance",        "lineality",      "all"};
    return names;
}

struct CheckOutput {
    json report;
    Verdict verdict = Verdict::pass;
};

CheckOutput run_check(const std::string& check, const RunConfig& c) {
    auto wrap = [](const VerificationResult& r) { return CheckOutput{to_json(r), r.verdict}; };
    if (check == "bohm-wilking") return wrap(verify_bohm_wilking(c.dim, c.trials, c.seed, c.tol));
    if (check == "ric0-weyl-pairing") return wrap(verify_ric0_weyl_pairing(c.dim));
    if (check == "q-product") return wrap(verify_q_product_identity(c.dim));
    if (check == "dim4-formula") {
        if (c.dim != 4) throw UsageError("dim4-formula requires --dim 4");
        return wrap(verify_dim4_formula(c.trials, c.seed));
    }
    if (check == "ode-closed-form") return wrap(verify_ode_closed_form(c.epsilon, c.t_max, c.step));
    if (check == "dim4-cone") {
        if (c.dim != 4) throw UsageError("dim4-cone requires --dim 4");
        const Dim4ConeReport r = verify_dim4_cone(c.base, c.samples, c.seed, c.tol);
        return {to_json(r), r.verdict};
    }
    if (check == "pic-witness") return wrap(pic_cfsf_witness(c.dim, c.budget, c.seed));
    if (check == "einstein-combination") return wrap(verify_einstein_combination(c.dim));
    if (check == "trace-identity") return wrap(verify_trace_identity(c.dim, c.trials, c.seed));
    if (check == "invariance") {
        const InvarianceReport r = check_invariance(make_cone(c.cone, c.dim), c.samples, c.seed, c.tol);
        return {to_json(r), r.verdict};
    }
    if (check == "lineality") {
        const LinealityReport r = lineality_space(make_cone(c.cone, c.dim), c.trials, c.seed, c.tol.lineality);
        return {to_json(r, c.cone, c.dim), Verdict::pass};
    }
    throw UsageError("unknown check '" + check + "'");
}

// Checks that apply at the requested dimension, in a fixed order.
std::vector<std::string> checks_for_all(int dim) {
    std::vector<std::string> out{"bohm-wilking"};
    if (dim >= 4) {
        out.push_back("ric0-weyl-pairing");
        out.push_back("q-product");
    }
    if (dim == 4) {
        out.push_back("dim4-formula");
        out.push_back("dim4-cone");
    }
    out.push_back("ode-closed-form");
    if (dim >= 5) {
        out.push_back("pic-witness");
        out.push_back("einstein-combination");
    }
    out.push_back("trace-identity");
    out.push_back("invariance");
    return out;
}

int run_verify(const std::string& check, const RunConfig& c) {
    if (std::find(check_names().begin(), check_names().end(), check) == check_names().end()) {
        throw UsageError("unknown check '" + check + "'");
    }
    json report;
    Verdict verdict = Verdict::pass;
    if (check == "all") {
        report["check"] = "all";
        report["n"] = c.dim;
        report["seed"] = c.seed;
        report["checks"] = json::array();
        bool any_fail = false, any_inconclusive = false;
        for (const std::string& name : checks_for_all(c.dim)) {
            const CheckOutput one = run_check(name, c);
            any_fail = any_fail || one.verdict == Verdict::fail || one.verdict == Verdict::violation;
            any_inconclusive = any_inconclusive || one.verdict == Verdict::inconclusive;
            report["checks"].push_back(one.report);
            std::cerr << name << ": " << to_string(one.verdict) << "\n";
        }
        verdict = any_fail ? Verdict::fail : (any_inconclusive ? Verdict::inconclusive : Verdict::pass);
        report["verdict"] = to_string(verdict);
        report["passed"] = verdict == Verdict::pass;
    } else {
        CheckOutput one = run_check(check, c);
        report = std::move(one.report);
        verdict = one.verdict;
    }
    report["config"] = c.to_json(check);
    emit(c.out, report.dump(2) + "\n");
    std::cerr << check << ": " << to_string(verdict) << (c.out.empty() ? "" : " -> " + c.out) << "\n";
    return exit_for(verdict);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvlab: algebraic curvature operators and Ricci flow invariant cones"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "root seed for every random draw")->capture_default_str();

    // model
    ModelArgs model;
    std::string blocks, kappas;
    auto* model_cmd = app.add_subcommand("model", "write a model-space curvature operator");
    model_cmd->add_option("--name", model.name, "model name")->required();
    model_cmd->add_option("--dim", model.params.dim, "dimension n")->capture_default_str();
    model_cmd->add_option("--kappa", model.params.kappa, "sectional curvature")->capture_default_str();
    model_cmd->add_option("--blocks", blocks, "block sizes for 'product', e.g. 3,3");
    model_cmd->add_option("--kappas", kappas, "block curvatures for 'product', e.g. 1,-1");
    model_cmd->add_option("--out", model.out, "output file (default <name>_<dim>.json)");

    // compute
    ComputeArgs compute;
    auto* compute_cmd = app.add_subcommand("compute", "apply decompose | q | ricci | sharp to an operator file");
    compute_cmd->add_option("op", compute.op, "decompose, q, ricci or sharp")->required();
    compute_cmd->add_option("--input", compute.input, "operator file")->required();
    compute_cmd->add_option("--out", compute.out, "output file (decompose writes _id/_ric0/_weyl siblings)");
    compute_cmd->add_option("--tol.bianchi", compute.bianchi_tol, "relative Bianchi residual warning level")
        ->capture_default_str();

    // evolve
    EvolveArgs evolve;
    auto* evolve_cmd = app.add_subcommand("evolve", "integrate dR/dt = Q(R) with RK4, CSV output");
    evolve_cmd->add_option("--input", evolve.input, "initial operator file")->required();
    evolve_cmd->add_option("--t-end", evolve.t_end, "final time")->capture_default_str();
    evolve_cmd->add_option("--step", evolve.step, "step size")->capture_default_str();
    evolve_cmd->add_option("--out", evolve.out, "CSV file (default stdout)");

    // verify
    RunConfig config;
    std::string check;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification check and write a JSON report");
    verify_cmd->add_option("check", check, "check name or 'all'")->required();
    verify_cmd->add_option("--dim", config.dim, "dimension n")->capture_default_str();
    verify_cmd->add_option("--trials", config.trials, "random trials for identity checks")->capture_default_str();
    verify_cmd->add_option("--samples", config.samples, "boundary samples for invariance")->capture_default_str();
    verify_cmd->add_option("--budget", config.budget, "margin evaluations for witness searches")
        ->capture_default_str();
    verify_cmd->add_option("--cone", config.cone, "cone for invariance / lineality")->capture_default_str();
    verify_cmd->add_option("--base", config.base, "base cone for dim4-cone (nno or 2nn)")->capture_default_str();
    verify_cmd->add_option("--epsilon", config.epsilon, "shift for ode-closed-form")->capture_default_str();
    verify_cmd->add_option("--t-max", config.t_max, "horizon for ode-closed-form")->capture_default_str();
    verify_cmd->add_option("--step", config.step, "step for ode-closed-form")->capture_default_str();
    verify_cmd->add_option("--out", config.out, "report file (default stdout)");
    for (const auto& [key, value] : config.tol.as_map()) {
        verify_cmd->add_option_function<double>(
            "--tol." + key, [&config, key = key](double v) { config.tol.set(key, v); },
            "tolerance override (default " + std::to_string(value) + ")");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*model_cmd) {
            for (const auto& b : split_list(blocks)) model.params.blocks.push_back(std::stoi(b));
            for (const auto& k : split_list(kappas)) model.params.kappas.push_back(std::stod(k));
            return run_model(model);
        }
        if (*compute_cmd) return run_compute(compute);
        if (*evolve_cmd) return run_evolve(evolve);
        if (*verify_cmd) {
            config.seed = seed;
            return run_verify(check, config);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const UnsupportedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failed;
    }
    return usage;
}
