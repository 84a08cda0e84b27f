#include "curvlab/errors.hpp"
#include "curvlab/invariance_lab.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/quadratic_flow.hpp"
#include "curvlab/random.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

using namespace curvlab;

TEST(Tolerances, OverridesByKey) {
    Tolerances t;
    EXPECT_TRUE(t.set("slope", 1e-3));
    EXPECT_DOUBLE_EQ(t.slope, 1e-3);
    EXPECT_FALSE(t.set("nope", 1.0));
    EXPECT_EQ(t.as_map().size(), 4u);
}

TEST(CheckInvariance, DeterministicForAFixedSeed) {
    const ConeSpec cone = make_cone("nno", 4);
    const InvarianceReport a = check_invariance(cone, 40, 17);
    const InvarianceReport b = check_invariance(cone, 40, 17);
    EXPECT_EQ(a.evaluated, b.evaluated);
    EXPECT_EQ(a.min_slope, b.min_slope);
    EXPECT_EQ(a.mean_slope, b.mean_slope);
    EXPECT_EQ(a.verdict, Verdict::pass);
    EXPECT_EQ(a.evaluated + a.recession_skipped + a.off_boundary_skipped, 40);
    const InvarianceReport c = check_invariance(cone, 40, 18);
    EXPECT_NE(a.min_slope, c.min_slope);
}

TEST(CheckInvariance, ScalarCurvatureConeIsInvariant) {
    const InvarianceReport r = check_invariance(make_cone("scal", 5), 100, 3);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_GT(r.evaluated, 0);
    EXPECT_GE(r.min_slope, -1e-8);
}

TEST(CheckInvariance, NonnegativeRicciViolationCarriesAWitness) {
    const InvarianceReport r = check_invariance(make_cone("nnricci", 4), 200, 7);
    ASSERT_EQ(r.verdict, Verdict::violation);
    ASSERT_TRUE(r.worst.has_value());
    EXPECT_GT(r.rejected, 0);
    EXPECT_LT(r.worst->slope_margin, -1e-4);
    EXPECT_NEAR(r.worst->revalidated_slope, r.worst->slope_margin, 1e-10);
    EXPECT_LT((r.worst->q_value - quadratic_term(r.worst->boundary_point)).norm(), 1e-12);
}

TEST(CheckInvariance, NoSamplesIsInconclusive) {
    EXPECT_EQ(check_invariance(make_cone("nno", 4), 0, 1).verdict, Verdict::inconclusive);
}

TEST(NegativeControl, ReportsAViolation) {
    const InvarianceReport r = run_negative_control(4, 200, 1);
    EXPECT_EQ(r.verdict, Verdict::violation);
    EXPECT_TRUE(r.worst.has_value());
}

TEST(BohmWilking, PassesAndRecordsResiduals) {
    const VerificationResult r = verify_bohm_wilking(5, 20, 42);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_TRUE(r.residuals.count("b_ric0_weyl"));
    EXPECT_LE(r.residuals.at("max"), 1e-10);
    const VerificationResult r3 = verify_bohm_wilking(3, 10, 42);
    EXPECT_EQ(r3.verdict, Verdict::pass);
    EXPECT_FALSE(r3.residuals.count("b_weyl_id"));
    EXPECT_EQ(verify_bohm_wilking(4, 0, 1).note, "no samples");
    EXPECT_THROW(verify_bohm_wilking(2, 10, 1), UnsupportedError);
}

TEST(BohmWilking, SameSeedSameResult) {
    const VerificationResult a = verify_bohm_wilking(4, 10, 9), b = verify_bohm_wilking(4, 10, 9);
    EXPECT_EQ(a.residuals, b.residuals);
}

TEST(Ric0WeylPairing, PositiveConstantAndCollinearity) {
    for (int n = 4; n <= 6; ++n) {
        const VerificationResult r = verify_ric0_weyl_pairing(n);
        EXPECT_EQ(r.verdict, Verdict::pass) << n;
        EXPECT_GT(r.constants.at("a"), 0.0);
    }
    EXPECT_NEAR(verify_ric0_weyl_pairing(4).constants.at("a"), 2.0 / 3.0, 1e-10);
    EXPECT_THROW(verify_ric0_weyl_pairing(3), UnsupportedError);
}

TEST(ProductIdentity, Passes) {
    for (int n = 4; n <= 6; ++n) EXPECT_EQ(verify_q_product_identity(n).verdict, Verdict::pass);
}

TEST(Dim4Formula, ClosedFormHoldsAndSpectrumIsQuarterSquareSum) {
    const VerificationResult r = verify_dim4_formula(20, 5);
    EXPECT_LE(r.residuals.at("closed_form"), 1e-10);
    EXPECT_LE(r.residuals.at("eigenvalues_vs_expanded_products"), 1e-10);
    EXPECT_GE(r.constants.at("min_relative_eigenvalue"), -1e-10);
    EXPECT_NEAR(r.constants.at("measured_over_stated_spectrum"), 0.5, 1e-10);
}

TEST(Dim4Formula, DiagonalExample) {
    const SymTensor2 ric0{Eigen::Vector4d(1, 1, -1, -1).asDiagonal().toDenseMatrix()};
    const Decomposition d = decompose(quadratic_term(from_traceless_ricci(ric0)));
    Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>((d.r_id + d.r_w).mat()).eigenvalues();
    const double expected[] = {0, 0, 0, 0, 1, 1};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(ev[i], expected[i], 1e-12);
}

TEST(OdeClosedForm, PassesOnComplexProjectivePlane) {
    const VerificationResult r = verify_ode_closed_form(0.1, 0.9, 1e-3);
    EXPECT_EQ(r.verdict, Verdict::pass) << r.note;
    EXPECT_LE(r.residuals.at("trajectory"), 1e-6);
}

TEST(OdeClosedForm, PureIdentityModeWhenWeylVanishes) {
    const VerificationResult r = verify_ode_closed_form(constant_curvature(4, 1.0), 0.2, 0.5, 1e-3);
    EXPECT_EQ(r.verdict, Verdict::pass) << r.note;
}

TEST(OdeClosedForm, Preconditions) {
    EXPECT_THROW(verify_ode_closed_form(0.0, 0.5, 1e-3), std::invalid_argument);
    EXPECT_THROW(verify_ode_closed_form(0.1, 1.0, 1e-3), std::invalid_argument);
    EXPECT_THROW(verify_ode_closed_form(sphere_times_hyperbolic(5), 0.1, 0.5, 1e-3), std::invalid_argument);
}

TEST(Dim4Cone, PassesAndRejectsUnknownBase) {
    const Dim4ConeReport r = verify_dim4_cone("nno", 50, 3);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_GE(r.containment.residuals.at("min_margin"), -1e-10);
    EXPECT_LE(r.containment.residuals.at("max_abs_margin"), 1e-15);
    EXPECT_THROW(verify_dim4_cone("scal", 10, 1), std::invalid_argument);
}

TEST(PicWitness, FoundInDimensionFiveAndRevalidates) {
    const VerificationResult r = pic_cfsf_witness(5, 200, 11);
    ASSERT_EQ(r.verdict, Verdict::pass);
    ASSERT_TRUE(r.witness.has_value());
    ASSERT_TRUE(r.witness_frame.has_value());
    EXPECT_LE(isotropic_curvature(*r.witness, *r.witness_frame), -1e-3 * r.witness->norm());
    EXPECT_THROW(pic_cfsf_witness(4, 10, 1), UnsupportedError);
    EXPECT_EQ(pic_cfsf_witness(5, 0, 1).verdict, Verdict::inconclusive);
}

TEST(EinsteinCombination, SphereTimesHyperbolicIngredients) {
    const VerificationResult r = verify_einstein_combination(5);
    EXPECT_LE(r.residuals.at("sxh2_weyl"), 1e-10);
    EXPECT_GT(r.constants.at("sxh2_scalar"), 0.0);
    EXPECT_NEAR(r.constants.at("einstein_coefficient"), 3.0, 1e-12);
}

TEST(EinsteinCombination, CoefficientNMinusTwoGivesAnEinsteinFixedPoint) {
    for (int n = 5; n <= 8; ++n) {
        const VerificationResult r = verify_einstein_combination(n, n - 2.0);
        EXPECT_EQ(r.verdict, Verdict::pass) << n;
        EXPECT_GT(r.constants.at("lambda"), 0.0);
    }
    EXPECT_THROW(verify_einstein_combination(4), UnsupportedError);
}

TEST(TraceIdentity, SingleConstant) {
    const VerificationResult r = verify_trace_identity(5, 30, 2);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_NEAR(r.constants.at("c"), 0.5, 1e-10);
}
