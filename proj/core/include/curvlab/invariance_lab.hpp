#pragma once

#include "curvlab/cones.hpp"
#include "curvlab/curvature.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace curvlab {

enum class Verdict { pass, fail, violation, inconclusive };

const char* to_string(Verdict v);

struct Tolerances {
    double boundary = 1e-9;
    double slope = 1e-6;
    double lineality = 1e-8;
    double identity = 1e-10;

    /// Applies an override by key (boundary, slope, lineality, identity).
    /// Returns false for unknown keys.
    bool set(const std::string& key, double value);
    std::map<std::string, double> as_map() const;
};

struct InvarianceWitness {
    CurvatureOperator boundary_point;
    CurvatureOperator q_value;
    double slope_margin = 0.0;
    std::optional<double> first_order_slope;
    double revalidated_slope = 0.0;
};

struct InvarianceReport {
    std::string cone;
    int n = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    Tolerances tolerances;
    int evaluated = 0;
    int recession_skipped = 0;
    int off_boundary_skipped = 0;
    int rejected = 0;          ///< samples whose tangent probe failed
    double min_slope = 0.0;
    double mean_slope = 0.0;
    std::optional<InvarianceWitness> worst;
    Verdict verdict = Verdict::pass;
    std::string note;
    double wall_time_s = 0.0;
};

/// Samples boundary points along random rays from Id and probes whether the
/// quadratic term points into the tangent cone at each of them.
InvarianceReport check_invariance(const ConeSpec& cone, int samples, std::uint64_t seed,
                                  const Tolerances& tolerances = {});

struct VerificationResult {
    std::string check;
    int n = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> residuals;
    std::map<std::string, double> constants;
    std::optional<CurvatureOperator> witness;
    std::optional<Matrix> witness_frame;
    Verdict verdict = Verdict::pass;
    std::string note;
};

/// Q(Id) = (n-1) Id, B(W,Id) = 0, B(R0,W) and B(R0,Id) in S^2_0 ^ id, over
/// random component-projected operators.
VerificationResult verify_bohm_wilking(int n, int trials, std::uint64_t seed,
                                       const Tolerances& tol = {});

/// B(R0, W) = a R0 for R0 the traceless-Ricci part of S^{n-2} x H^2 and W
/// the Weyl part of Q(R0).
VerificationResult verify_ric0_weyl_pairing(int n);

/// Q(S^{n-2}(1) x H^2(-1)) = S^{n-2}(n-3) x S^2(1).
VerificationResult verify_q_product_identity(int n);

/// n = 4: Q(R0)_Id + Q(R0)_W against 1/2 ric0^ric0 + 1/2 ric0^2^id, and its
/// spectrum against (l_i + l_j)^2 / 2.
VerificationResult verify_dim4_formula(int trials, std::uint64_t seed);

/// Closed-form blow-up of an Einstein symmetric operator rescaled to Q(R) = R
/// and shifted by -epsilon R_Id, compared with the RK4 integrator.
VerificationResult verify_ode_closed_form(double epsilon, double t_max, double step);
VerificationResult verify_ode_closed_form(const CurvatureOperator& einstein_symmetric,
                                          double epsilon, double t_max, double step);

struct Dim4ConeReport {
    InvarianceReport invariance;
    VerificationResult containment;
    Verdict verdict = Verdict::pass;
};

/// Invariance and conformally-flat scalar-flat containment of the dim-4
/// construction over base "nno" or "2nn".
Dim4ConeReport verify_dim4_cone(const std::string& base, int samples, std::uint64_t seed,
                                    const Tolerances& tol = {});

/// Search for a conformally flat scalar flat operator with negative
/// isotropic curvature. n >= 5; budget counts PIC margin evaluations.
VerificationResult pic_cfsf_witness(int n, int budget, std::uint64_t seed);

/// R + c Rbar with R = S^{n-2} x H^2, Rbar = R^{n-2} x S^2 and c = n - 3
/// unless given: Einstein residual, Q = lambda (.) residual, and conformal
/// flatness / positive scalar curvature of R. n >= 5.
VerificationResult verify_einstein_combination(int n, std::optional<double> coefficient = std::nullopt);

/// trace Q(R) = c |Ric|^2 with one empirical constant; trace Q(W) = 0.
VerificationResult verify_trace_identity(int n, int trials, std::uint64_t seed);

/// Invariance check of the nonnegative-Ricci cone, falling back to the
/// synthetic orbit cone when no violation is found.
InvarianceReport run_negative_control(int n, int samples, std::uint64_t seed,
                                      const Tolerances& tol = {});

}  // namespace curvlab
