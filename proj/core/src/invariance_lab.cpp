#include "curvlab/invariance_lab.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/quadratic_flow.hpp"
#include "curvlab/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

namespace {

double rel(double num, double den) { return num / std::max(den, 1e-300); }

Vector sorted_eigenvalues(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

Verdict pass_if(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::violation: return "violation";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

bool Tolerances::set(const std::string& key, double value) {
    if (key == "boundary") boundary = value;
    else if (key == "slope") slope = value;
    else if (key == "lineality") lineality = value;
    else if (key == "identity") identity = value;
    else return false;
    return true;
}

std::map<std::string, double> Tolerances::as_map() const {
    return {{"boundary", boundary}, {"slope", slope}, {"lineality", lineality}, {"identity", identity}};
}

InvarianceReport check_invariance(const ConeSpec& cone, int samples, std::uint64_t seed,
                                  const Tolerances& tolerances) {
    const auto started = std::chrono::steady_clock::now();
    InvarianceReport report;
    report.cone = cone.name;
    report.n = cone.n;
    report.samples = samples;
    report.seed = seed;
    report.tolerances = tolerances;

    enum class Kind { recession, off_boundary, probed };
    struct Sample {
        Kind kind = Kind::recession;
        std::optional<CurvatureOperator> point;
        std::optional<CurvatureOperator> q;
        TangentProbe probe;
    };
    const BoundaryOptions boundary{tolerances.boundary, 1e6};
    ProbeOptions probe_options;
    probe_options.slope_tol = tolerances.slope;
    probe_options.boundary_tol = tolerances.boundary;

    std::vector<Sample> results(std::max(samples, 0));
    parallel_for(results.size(), [&](std::size_t i) {
        Rng rng(seed, "invariance", i);
        const CurvatureOperator x = random_operator(cone.n, rng);
        BoundaryPoint bp = boundary_point(cone, x, boundary);
        Sample& s = results[i];
        if (bp.recession) return;
        CurvatureOperator q = quadratic_term(*bp.point);
        try {
            s.probe = tangent_probe(cone, *bp.point, q, probe_options);
            s.kind = Kind::probed;
        } catch (const std::invalid_argument&) {
            s.kind = Kind::off_boundary;
        }
        s.point = std::move(bp.point);
        s.q = std::move(q);
    });

    std::optional<std::size_t> worst;
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Sample& s = results[i];
        if (s.kind == Kind::recession) {
            ++report.recession_skipped;
            continue;
        }
        if (s.kind == Kind::off_boundary) {
            ++report.off_boundary_skipped;
            continue;
        }
        ++report.evaluated;
        if (!s.probe.accepted) ++report.rejected;
        const double y = s.probe.slope_margin - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        // prefer rejected samples as witnesses, then the smallest slope
        if (!worst) {
            worst = i;
        } else {
            const Sample& w = results[*worst];
            const bool better = (!s.probe.accepted && w.probe.accepted) ||
                                (s.probe.accepted == w.probe.accepted &&
                                 s.probe.slope_margin < w.probe.slope_margin);
            if (better) worst = i;
        }
    }

    if (report.evaluated == 0) {
        report.verdict = Verdict::inconclusive;
        report.note = "no boundary samples (all rays in the recession cone)";
    } else {
        report.mean_slope = sum / report.evaluated;
        report.min_slope = std::numeric_limits<double>::infinity();
        for (const Sample& s : results)
            if (s.kind == Kind::probed) report.min_slope = std::min(report.min_slope, s.probe.slope_margin);

        const Sample& w = results[*worst];
        InvarianceWitness witness{*w.point, *w.q, w.probe.slope_margin, w.probe.first_order_slope, 0.0};
        witness.revalidated_slope = tangent_probe(cone, *w.point, *w.q, probe_options).slope_margin;
        report.worst = std::move(witness);
        report.verdict = report.rejected > 0 ? Verdict::violation : Verdict::pass;
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

VerificationResult verify_bohm_wilking(int n, int trials, std::uint64_t seed, const Tolerances& tol) {
    if (n < 3) throw UnsupportedError("verify_bohm_wilking: requires n >= 3");
    VerificationResult out;
    out.check = "bohm-wilking";
    out.n = n;
    out.trials = trials;
    out.seed = seed;

    const CurvatureOperator id = CurvatureOperator::identity(n);
    const CurvatureOperator q_id = quadratic_term(id);
    out.residuals["q_id"] = rel((q_id - (n - 1.0) * id).norm(), (n - 1.0) * id.norm());

    double b_weyl_id = 0.0, b_ric0_weyl = 0.0, b_ric0_id = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed, "bohm-wilking", static_cast<std::uint64_t>(t));
        const CurvatureOperator r0 = random_operator(n, rng, Component::traceless_ricci);
        const CurvatureOperator b0 = quadratic_bilinear(r0, id);
        const Decomposition d0 = decompose(b0);
        b_ric0_id = std::max(b_ric0_id, rel((d0.r_id + d0.r_w).norm(), r0.norm() * id.norm()));
        if (n >= 4) {
            const CurvatureOperator w = random_operator(n, rng, Component::weyl);
            b_weyl_id = std::max(b_weyl_id, rel(quadratic_bilinear(w, id).norm(), w.norm() * id.norm()));
            const Decomposition dw = decompose(quadratic_bilinear(r0, w));
            b_ric0_weyl = std::max(b_ric0_weyl, rel((dw.r_id + dw.r_w).norm(), r0.norm() * w.norm()));
        }
    }
    if (trials > 0) {
        out.residuals["b_ric0_id"] = b_ric0_id;
        if (n >= 4) {
            out.residuals["b_weyl_id"] = b_weyl_id;
            out.residuals["b_ric0_weyl"] = b_ric0_weyl;
        } else {
            out.note = "n = 3: Weyl summand is zero, B(W, .) checks skipped";
        }
    } else {
        out.note = "no samples";
    }
    double worst = 0.0;
    for (const auto& [_, v] : out.residuals) worst = std::max(worst, v);
    out.residuals["max"] = worst;
    out.verdict = pass_if(worst <= tol.identity);
    return out;
}

VerificationResult verify_ric0_weyl_pairing(int n) {
    if (n < 4) throw UnsupportedError("verify_ric0_weyl_pairing: requires n >= 4");
    VerificationResult out;
    out.check = "ric0-weyl-pairing";
    out.n = n;

    const CurvatureOperator r0 = decompose(sphere_times_hyperbolic(n)).r_0;
    const CurvatureOperator w = decompose(quadratic_term(r0)).r_w;
    const CurvatureOperator l = quadratic_bilinear(r0, w);
    const double a = l.inner(r0) / r0.inner(r0);
    const Decomposition dl = decompose(l);
    const ProductSplitting split = ProductSplitting::of({n - 2, 2});

    out.constants["a"] = a;
    out.constants["weyl_norm"] = w.norm();
    out.constants["pairing_L_R0"] = l.inner(r0);
    out.residuals["collinearity"] = rel((l - a * r0).norm(), l.norm());
    out.residuals["pairing_vs_weyl_norm_sq"] = rel(std::abs(l.inner(r0) - w.inner(w)), w.inner(w));
    out.residuals["L_outside_ric0"] = rel((dl.r_id + dl.r_w).norm(), l.norm());
    out.residuals["L_family_leakage"] = rel(family_leakage(l.mat(), split), l.norm());

    const bool ok = a > 0.0 && out.residuals["collinearity"] <= 1e-9 && w.norm() > 1e-12 &&
                    out.residuals["pairing_vs_weyl_norm_sq"] <= 1e-10 &&
                    out.residuals["L_outside_ric0"] <= 1e-10 && out.residuals["L_family_leakage"] <= 1e-10;
    out.verdict = pass_if(ok);
    return out;
}

VerificationResult verify_q_product_identity(int n) {
    if (n < 4) throw UnsupportedError("verify_q_product_identity: requires n >= 4");
    VerificationResult out;
    out.check = "q-product";
    out.n = n;
    const CurvatureOperator r = sphere_times_hyperbolic(n);
    const CurvatureOperator expected = product(constant_curvature(n - 2, n - 3.0), constant_curvature(2, 1.0));
    const CurvatureOperator qr = quadratic_term(r);
    out.residuals["product_identity"] = rel((qr - expected).norm(), std::max(1.0, expected.norm()));
    out.residuals["homogeneity"] = rel((quadratic_term(2.0 * r) - 4.0 * qr).norm(), 4.0 * qr.norm());
    out.constants["first_factor_curvature"] = n - 3.0;
    out.verdict = pass_if(out.residuals["product_identity"] <= 1e-12 && out.residuals["homogeneity"] <= 1e-12);
    return out;
}

VerificationResult verify_dim4_formula(int trials, std::uint64_t seed) {
    VerificationResult out;
    out.check = "dim4-formula";
    out.n = 4;
    out.trials = trials;
    out.seed = seed;
    const SymTensor2 id = SymTensor2::identity(4);
    const BivectorBasis basis(4);

    double closed = 0.0, stated = 0.0, expanded = 0.0, min_eig = std::numeric_limits<double>::infinity();
    double measured_sum = 0.0, stated_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed, "dim4-formula", static_cast<std::uint64_t>(t));
        const SymTensor2 ric0 = random_traceless(4, rng);
        const Decomposition dq = decompose(quadratic_term(from_traceless_ricci(ric0)));
        const CurvatureOperator l = dq.r_id + dq.r_w;
        const SymTensor2 ric0_sq{ric0.mat * ric0.mat};
        const CurvatureOperator formula = 0.5 * wedge_sym(ric0, ric0) + 0.5 * wedge_sym(ric0_sq, id);
        closed = std::max(closed, rel((l - formula).norm(), formula.norm()));

        const Vector lam = sorted_eigenvalues(ric0.mat);
        std::vector<double> mu_stated, mu_expanded;
        for (int p = 0; p < basis.dim(); ++p) {
            auto [i, j] = basis.pair_of(p);
            mu_stated.push_back((lam[i] + lam[j]) * (lam[i] + lam[j]) / 2.0);
            mu_expanded.push_back(lam[i] * lam[j] / 2.0 + (lam[i] * lam[i] + lam[j] * lam[j]) / 4.0);
        }
        std::sort(mu_stated.begin(), mu_stated.end());
        std::sort(mu_expanded.begin(), mu_expanded.end());
        const Vector measured = sorted_eigenvalues(l.mat());
        const double scale = std::max(1e-300, *std::max_element(mu_stated.begin(), mu_stated.end()));
        for (int k = 0; k < basis.dim(); ++k) {
            stated = std::max(stated, std::abs(measured[k] - mu_stated[k]) / scale);
            expanded = std::max(expanded, std::abs(measured[k] - mu_expanded[k]) / scale);
            measured_sum += measured[k];
            stated_sum += mu_stated[k];
        }
        min_eig = std::min(min_eig, measured[0] / scale);
    }
    if (trials == 0) {
        out.note = "no samples";
        return out;
    }
    out.residuals["closed_form"] = closed;
    out.residuals["eigenvalues_vs_half_square_sum"] = stated;
    out.residuals["eigenvalues_vs_expanded_products"] = expanded;
    out.constants["min_relative_eigenvalue"] = min_eig;
    out.constants["measured_over_stated_spectrum"] = measured_sum / stated_sum;
    const bool ok = closed <= 1e-10 && stated <= 1e-10 && min_eig >= -1e-10;
    out.verdict = pass_if(ok);
    if (!ok && closed <= 1e-10 && expanded <= 1e-10) {
        out.note = "closed form holds and the spectrum is l_i l_j/2 + (l_i^2 + l_j^2)/4 = (l_i + l_j)^2/4; "
                   "it does not equal (l_i + l_j)^2/2";
    }
    return out;
}

VerificationResult verify_ode_closed_form(double epsilon, double t_max, double step) {
    return verify_ode_closed_form(fubini_study(2), epsilon, t_max, step);
}

VerificationResult verify_ode_closed_form(const CurvatureOperator& model, double epsilon, double t_max,
                                          double step) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("ode closed form: need 0 < epsilon < 1");
    if (!(t_max > 0.0 && t_max < 1.0)) throw std::invalid_argument("ode closed form: need 0 < t_max < 1");
    const EinsteinFit fit = einstein_constant(model);
    if (fit.residual > 1e-10 || fit.lambda <= 0.0) {
        throw std::invalid_argument("ode closed form: model is not Einstein with positive constant");
    }
    if ((quadratic_term(model) - fit.lambda * model).norm() > 1e-10 * fit.lambda * model.norm()) {
        throw std::invalid_argument("ode closed form: model does not satisfy Q(R) = lambda R");
    }

    VerificationResult out;
    out.check = "ode-closed-form";
    out.n = model.n();
    out.constants["epsilon"] = epsilon;
    out.constants["t_max"] = t_max;
    out.constants["step"] = step;
    out.constants["lambda"] = fit.lambda;

    const CurvatureOperator s = (1.0 / fit.lambda) * model;
    const Decomposition d = decompose(s);
    const CurvatureOperator bar_id = (1.0 - epsilon) * d.r_id;
    const CurvatureOperator bar_w = d.r_w;
    const CurvatureOperator bar = bar_id + bar_w;
    out.residuals["ric0_part"] = rel(d.r_0.norm(), s.norm());
    out.residuals["q_id_eigen"] = rel((quadratic_term(bar_id) - (1.0 - epsilon) * bar_id).norm(), bar_id.norm());
    out.residuals["q_weyl_eigen"] =
        bar_w.norm() > 1e-12 * bar.norm() ? rel((quadratic_term(bar_w) - bar_w).norm(), bar_w.norm()) : 0.0;

    auto closed_form = [&](double t) {
        return (1.0 / (1.0 - (1.0 - epsilon) * t)) * bar_id + (1.0 / (1.0 - t)) * bar_w;
    };
    const OdeResult run = ode_evolve(bar, t_max, step);
    double worst = 0.0;
    for (std::size_t k = 0; k < run.trajectory.states.size(); ++k) {
        const CurvatureOperator exact = closed_form(run.trajectory.times[k]);
        worst = std::max(worst, rel((run.trajectory.states[k] - exact).norm(), exact.norm()));
    }
    out.residuals["trajectory"] = worst;
    out.constants["final_time"] = run.last_time();

    // (1 - t) Rbar(t) -> Rbar_W as t -> 1; measured against |Rbar| when the
    // Weyl part vanishes
    const double limit_scale = bar_w.norm() > 1e-12 * bar.norm() ? bar_w.norm() : bar.norm();
    double previous = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double last = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const double t = 1.0 - std::pow(10.0, -k);
        last = rel(((1.0 - t) * closed_form(t) - bar_w).norm(), limit_scale);
        monotone = monotone && last < previous;
        previous = last;
    }
    out.residuals["rescaled_limit_distance"] = last;
    out.constants["rescaled_limit_monotone"] = monotone ? 1.0 : 0.0;

    const bool ok = run.status == OdeStatus::completed && out.residuals["ric0_part"] <= 1e-10 &&
                    out.residuals["q_id_eigen"] <= 1e-10 && out.residuals["q_weyl_eigen"] <= 1e-10 &&
                    worst <= 1e-6 && monotone && last <= 1e-6;
    out.verdict = pass_if(ok);
    if (run.status != OdeStatus::completed) out.note = std::string("integration ended: ") + to_string(run.status);
    return out;
}

Dim4ConeReport verify_dim4_cone(const std::string& base, int samples, std::uint64_t seed,
                                    const Tolerances& tol) {
    if (base != "nno" && base != "2nn") {
        throw std::invalid_argument("dim4 cone check: base must be nno or 2nn, got '" + base + "'");
    }
    const ConeSpec cone = make_cone("dim4:" + base, 4);
    Dim4ConeReport report;
    report.invariance = check_invariance(cone, samples, seed, tol);

    VerificationResult& c = report.containment;
    c.check = "dim4-containment";
    c.n = 4;
    c.trials = 100;
    c.seed = seed;
    double worst = std::numeric_limits<double>::infinity();
    double r0_exact = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        Rng rng(seed, "dim4-containment", static_cast<std::uint64_t>(t));
        CurvatureOperator r = random_operator(4, rng, Component::traceless_ricci);
        r *= 1.0 / r.norm();
        const double m = cone.margin(r);
        worst = std::min(worst, m);
        r0_exact = std::max(r0_exact, std::abs(m));
    }
    c.residuals["min_margin"] = worst;
    c.residuals["max_abs_margin"] = r0_exact;
    c.verdict = pass_if(worst >= -1e-10);
    report.verdict = (report.invariance.verdict == Verdict::pass && c.verdict == Verdict::pass)
                         ? Verdict::pass
                         : (report.invariance.verdict == Verdict::violation ? Verdict::violation : Verdict::fail);
    return report;
}

VerificationResult pic_cfsf_witness(int n, int budget, std::uint64_t seed) {
    if (n < 5) {
        throw UnsupportedError("pic_cfsf_witness: requires n >= 5 (in dimension 4 the PIC cone contains "
                               "every conformally flat scalar flat operator)");
    }
    VerificationResult out;
    out.check = "pic-witness";
    out.n = n;
    out.trials = budget;
    out.seed = seed;
    constexpr double threshold = -1e-3;

    PicOptions search;
    search.starts = 8;
    search.seed = derive_seed(seed, "pic-search");
    Rng rng(seed, "pic-witness");

    std::optional<SymTensor2> best;
    double best_score = std::numeric_limits<double>::infinity();
    FrameMinimum best_min;
    int used = 0;
    while (used < budget && best_score > threshold) {
        SymTensor2 candidate = random_traceless(n, rng);
        candidate.mat /= candidate.norm();
        if (best && used % 4 != 0) {
            candidate.mat = best->mat + 0.3 * candidate.mat;
            candidate.mat /= candidate.norm();
        }
        const CurvatureOperator r = from_traceless_ricci(candidate);
        FrameMinimum m = margin_pic(r, search);
        ++used;
        const double score = m.value / r.norm();
        if (score < best_score) {
            best_score = score;
            best = candidate;
            best_min = std::move(m);
        }
    }
    out.constants["evaluations"] = used;
    out.constants["relative_margin"] = best_score;
    if (!best || best_score > threshold) {
        out.verdict = Verdict::inconclusive;
        out.note = "no witness within budget";
        return out;
    }

    const CurvatureOperator r = from_traceless_ricci(*best);
    const double direct = isotropic_curvature(r, best_min.frame);
    const Decomposition d = decompose(r);
    out.constants["margin"] = best_min.value;
    out.constants["operator_norm"] = r.norm();
    out.residuals["revalidation"] = std::abs(direct - best_min.value) / std::max(1.0, std::abs(best_min.value));
    out.residuals["frame_orthonormality"] =
        (best_min.frame.transpose() * best_min.frame - Matrix::Identity(4, 4)).norm();
    out.residuals["conformally_flat_scalar_flat"] = rel((d.r_id + d.r_w).norm(), r.norm());
    out.witness = r;
    out.witness_frame = best_min.frame;
    const bool ok = out.residuals["revalidation"] <= 1e-10 && out.residuals["frame_orthonormality"] <= 1e-10 &&
                    out.residuals["conformally_flat_scalar_flat"] <= 1e-10 &&
                    direct <= threshold * r.norm();
    out.verdict = pass_if(ok);
    return out;
}

VerificationResult verify_einstein_combination(int n, std::optional<double> coefficient) {
    if (n < 5) throw UnsupportedError("verify_einstein_combination: requires n >= 5");
    VerificationResult out;
    out.check = "einstein-combination";
    out.n = n;
    const double c = coefficient.value_or(n - 3.0);
    const CurvatureOperator r = sphere_times_hyperbolic(n);
    const CurvatureOperator rbar = flat_times_sphere(n);
    const CurvatureOperator s = r + c * rbar;
    const EinsteinFit fit = einstein_constant(s);
    out.constants["coefficient"] = c;
    out.constants["lambda"] = fit.lambda;
    out.residuals["einstein"] = fit.residual;
    out.residuals["q_fixed_point"] =
        rel((quadratic_term(s) - fit.lambda * s).norm(), std::abs(fit.lambda) * s.norm());

    // coefficient making R + c Rbar Einstein: least squares on traceless Ricci
    const Matrix a = ricci(r).traceless().mat;
    const Matrix b = ricci(rbar).traceless().mat;
    out.constants["einstein_coefficient"] = -a.cwiseProduct(b).sum() / b.squaredNorm();

    out.residuals["sxh2_weyl"] = rel(decompose(r).r_w.norm(), r.norm());
    out.constants["sxh2_scalar"] = scalar(r);

    const bool ok = fit.residual <= 1e-10 && fit.lambda > 0.0 && out.residuals["q_fixed_point"] <= 1e-10 &&
                    out.residuals["sxh2_weyl"] <= 1e-10 && scalar(r) > 0.0;
    out.verdict = pass_if(ok);
    if (fit.residual > 1e-10) {
        out.note = "R + c Rbar is not Einstein for c = " + std::to_string(c) +
                   "; the Einstein combination has c = " + std::to_string(out.constants["einstein_coefficient"]);
    }
    return out;
}

VerificationResult verify_trace_identity(int n, int trials, std::uint64_t seed) {
    if (n < 3) throw UnsupportedError("verify_trace_identity: requires n >= 3");
    VerificationResult out;
    out.check = "trace-identity";
    out.n = n;
    out.trials = trials;
    out.seed = seed;
    std::vector<double> ratios;
    double weyl = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed, "trace-identity", static_cast<std::uint64_t>(t));
        const CurvatureOperator r = random_operator(n, rng);
        ratios.push_back(quadratic_term(r).trace() / ricci(r).mat.squaredNorm());
        if (n >= 4) {
            const CurvatureOperator w = random_operator(n, rng, Component::weyl);
            weyl = std::max(weyl, std::abs(quadratic_term(w).trace()) / w.inner(w));
        }
    }
    if (ratios.empty()) {
        out.note = "no samples";
        return out;
    }
    double mean = 0.0;
    for (double x : ratios) mean += x;
    mean /= ratios.size();
    double spread = 0.0;
    for (double x : ratios) spread = std::max(spread, std::abs(x - mean) / std::abs(mean));
    out.constants["c"] = mean;
    out.residuals["spread"] = spread;
    out.residuals["weyl_trace"] = weyl;
    out.verdict = pass_if(mean > 0.0 && spread <= 1e-10 && weyl <= 1e-10);
    return out;
}

InvarianceReport run_negative_control(int n, int samples, std::uint64_t seed, const Tolerances& tol) {
    InvarianceReport report = check_invariance(make_cone("nnricci", n), samples, seed, tol);
    if (report.verdict == Verdict::violation) return report;
    InvarianceReport fallback =
        check_invariance(make_orbit_cone(n, 32, derive_seed(seed, "orbit")), samples, seed, tol);
    fallback.note = "nonnegative-Ricci cone gave no violation in " + std::to_string(samples) +
                    " samples; synthetic orbit cone used instead";
    return fallback;
}

}  // namespace curvlab
