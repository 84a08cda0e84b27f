#include "curvlab/cones.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/quadratic_flow.hpp"
#include "curvlab/random.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

using namespace curvlab;

namespace {

double lambda_min(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

// Random operator shifted so that it is nonnegative with smallest eigenvalue `floor`.
CurvatureOperator nonnegative(int n, Rng& rng, double floor = 0.0) {
    const CurvatureOperator r = random_operator(n, rng);
    return r + (floor - lambda_min(r.mat())) * CurvatureOperator::identity(n);
}

}  // namespace

TEST(Margins, ClosedFormValues) {
    const CurvatureOperator id = CurvatureOperator::identity(4);
    EXPECT_NEAR(margin_scal(id), std::sqrt(6.0), 1e-14);
    EXPECT_NEAR(margin_nn_operator(id), 1.0, 1e-14);
    EXPECT_NEAR(margin_2nn(id), 2.0, 1e-14);
    EXPECT_NEAR(margin_nn_ricci(id), 3.0, 1e-14);
    const Matrix frame = Matrix::Identity(4, 4);
    EXPECT_NEAR(isotropic_curvature(id, frame), 4.0, 1e-14);
    EXPECT_NEAR(margin_pic(id).value, 4.0, 1e-10);
}

TEST(Margins, HomogeneousAndInvariant) {
    Rng rng(30);
    for (const char* name : {"scal", "nno", "2nn", "nnricci", "dim4:nno", "dim4:2nn"}) {
        const ConeSpec cone = make_cone(name, 4);
        const CurvatureOperator r = random_operator(4, rng);
        const Matrix g = haar_orthogonal(4, rng);
        EXPECT_NEAR(cone.margin(2.5 * r), 2.5 * cone.margin(r), 1e-12 * r.norm()) << name;
        EXPECT_NEAR(cone.margin(act(g, r)), cone.margin(r), 1e-12 * r.norm()) << name;
        EXPECT_EQ(cone.eval(r).certification, Certification::exact);
    }
}

TEST(Margins, EvalRejectsWrongDimension) {
    const ConeSpec cone = make_cone("nno", 4);
    EXPECT_THROW(cone.eval(CurvatureOperator::identity(5)), std::invalid_argument);
}

TEST(Pic, FrameDescentFindsTheMinimumOverFrames) {
    Rng rng(31);
    const CurvatureOperator r = random_operator(5, rng) + 3.0 * CurvatureOperator::identity(5);
    const FrameMinimum m = margin_pic(r);
    EXPECT_LT((m.frame.transpose() * m.frame - Matrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_NEAR(isotropic_curvature(r, m.frame), m.value, 1e-10);
    for (int t = 0; t < 200; ++t) {
        const Matrix frame = haar_orthogonal(5, rng).leftCols(4);
        EXPECT_GE(isotropic_curvature(r, frame), m.value - 1e-9);
    }
}

TEST(Pic, ContainsNonnegativeOperators) {
    Rng rng(32);
    PicOptions opts;
    opts.starts = 16;
    for (int n = 4; n <= 6; ++n) EXPECT_GE(margin_pic(nonnegative(n, rng), opts).value, -1e-9) << n;
}

TEST(Pic, DimensionFourContainsConformallyFlatScalarFlatOperators) {
    Rng rng(33);
    PicOptions opts;
    opts.starts = 16;
    for (int t = 0; t < 5; ++t) {
        const CurvatureOperator r = random_operator(4, rng, Component::traceless_ricci);
        EXPECT_GE(margin_pic(r, opts).value, -1e-9 * r.norm());
    }
}

TEST(Pic, ProductVariantsAreNested) {
    Rng rng(34);
    PicOptions opts;
    opts.starts = 16;
    const CurvatureOperator r = random_operator(4, rng) + 2.0 * CurvatureOperator::identity(4);
    const double pic = margin_pic(r, opts).value;
    const double pic1 = margin_pic1(r, opts).value;
    const double pic2 = margin_pic2(r, opts).value;
    EXPECT_LE(pic1, pic + 1e-9);
    EXPECT_LE(pic2, pic1 + 1e-9);
    EXPECT_EQ(margin_pic1(r, opts).frame.rows(), 5);
    EXPECT_THROW(margin_pic(CurvatureOperator::identity(3)), UnsupportedError);
}

TEST(Registry, Errors) {
    EXPECT_THROW(make_cone("nope", 4), std::invalid_argument);
    EXPECT_THROW(make_cone("nno", 2), UnsupportedError);
    EXPECT_THROW(make_cone("dim4:nno", 5), UnsupportedError);
    EXPECT_THROW(make_cone("pic", 3), UnsupportedError);
    EXPECT_EQ(make_cone("pic", 4).certification, Certification::heuristic);
    for (const std::string& name : cone_names()) {
        if (name.find('<') != std::string::npos) continue;
        const ConeSpec cone = make_cone(name, 4);
        EXPECT_GT(cone.margin(CurvatureOperator::identity(4)), 0.0) << name;
    }
}

TEST(Dim4Construction, DropsTheTracelessRicciPart) {
    Rng rng(35);
    const ConeSpec cone = make_cone("dim4:nno", 4);
    const CurvatureOperator r0 = random_operator(4, rng, Component::traceless_ricci);
    EXPECT_LE(std::abs(cone.margin(r0)), 1e-15 * r0.norm());
    EXPECT_NEAR(cone.margin(r0 + CurvatureOperator::identity(4)), 1.0, 1e-12);
}

TEST(Boundary, BisectionLandsOnTheInnerSide) {
    Rng rng(36);
    for (const char* name : {"scal", "nno", "2nn", "nnricci"}) {
        const ConeSpec cone = make_cone(name, 5);
        for (int t = 0; t < 20; ++t) {
            const BoundaryPoint bp = boundary_point(cone, random_operator(5, rng));
            if (bp.recession) continue;
            const double m = cone.margin(*bp.point);
            EXPECT_GE(m, 0.0) << name;
            EXPECT_LE(m, 1e-9 * (1.0 + bp.point->norm())) << name;
        }
    }
}

TEST(Boundary, RecessionDirectionsAreFlagged) {
    const ConeSpec cone = make_cone("nno", 4);
    const BoundaryPoint bp = boundary_point(cone, 2.0 * CurvatureOperator::identity(4));
    EXPECT_TRUE(bp.recession);
    EXPECT_FALSE(bp.point.has_value());
}

TEST(TangentProbe, AgreesWithFirstOrderSlope) {
    Rng rng(37);
    const ConeSpec cone = make_cone("nno", 4);
    int checked = 0;
    for (int t = 0; t < 20; ++t) {
        const BoundaryPoint bp = boundary_point(cone, random_operator(4, rng));
        if (bp.recession) continue;
        const CurvatureOperator v = random_operator(4, rng);
        const TangentProbe probe = tangent_probe(cone, *bp.point, v);
        ASSERT_TRUE(probe.first_order_slope.has_value());
        EXPECT_NEAR(probe.slope_margin, *probe.first_order_slope, 1e-2 * v.norm());
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(TangentProbe, RejectsInteriorPoints) {
    const ConeSpec cone = make_cone("nno", 4);
    const CurvatureOperator id = CurvatureOperator::identity(4);
    EXPECT_THROW(tangent_probe(cone, id, id), std::invalid_argument);
}

TEST(TangentProbe, InwardAndOutwardDirections) {
    const ConeSpec cone = make_cone("nno", 4);
    Rng rng(38);
    const CurvatureOperator rb = nonnegative(4, rng);
    const CurvatureOperator id = CurvatureOperator::identity(4);
    EXPECT_TRUE(tangent_probe(cone, rb, id).accepted);
    EXPECT_FALSE(tangent_probe(cone, rb, -1.0 * id).accepted);
}

TEST(Lineality, Classification) {
    const LinealityReport scal = lineality_space(make_cone("scal", 4), 16, 1);
    EXPECT_EQ(scal.cone_class, "C_scal");
    EXPECT_FALSE(scal.flagged(Component::identity));
    EXPECT_TRUE(scal.flagged(Component::traceless_ricci));
    EXPECT_TRUE(scal.flagged(Component::weyl));
    EXPECT_EQ(lineality_space(make_cone("nno", 5), 16, 1).cone_class, "coercive");
    const LinealityReport d4 = lineality_space(make_cone("dim4:2nn", 4), 16, 1);
    EXPECT_TRUE(d4.flagged(Component::traceless_ricci));
    EXPECT_FALSE(d4.flagged(Component::weyl));
    EXPECT_EQ(d4.cone_class, "contains S2_0^id");
}

TEST(Lineality, NonnegativeRicciContainsWeyl) {
    const LinealityReport r = lineality_space(make_cone("nnricci", 5), 16, 1);
    EXPECT_TRUE(r.flagged(Component::weyl));
    EXPECT_FALSE(r.flagged(Component::traceless_ricci));
    EXPECT_EQ(r.cone_class, "contains W");
}

TEST(Haar, AverageProjectsOntoTheIdentityComponent) {
    Rng rng(39);
    const CurvatureOperator r = random_operator(4, rng);
    const CurvatureOperator avg = haar_average(r, 20000, 5);
    EXPECT_LT((avg - decompose(r).r_id).norm(), 0.05 * r.norm());
    EXPECT_LT((haar_average(r, 1000, 5) - haar_average(r, 1000, 5)).norm(), 1e-15);
}

TEST(Haar, SamplesAreOrthogonalWithBothDeterminants) {
    Rng rng(40);
    int negative = 0;
    for (int t = 0; t < 200; ++t) {
        const Matrix g = haar_orthogonal(4, rng);
        EXPECT_LT((g.transpose() * g - Matrix::Identity(4, 4)).norm(), 1e-12);
        if (g.determinant() < 0) ++negative;
        EXPECT_NEAR(haar_special_orthogonal(4, rng).determinant(), 1.0, 1e-12);
    }
    EXPECT_GT(negative, 60);
    EXPECT_LT(negative, 140);
}

TEST(TraceSlice, CoerciveConesAreBounded) {
    EXPECT_EQ(probe_trace_slice(make_cone("nno", 4), 50, 3).unbounded, 0);
    EXPECT_GT(probe_trace_slice(make_cone("scal", 4), 50, 3).unbounded, 0);
}

TEST(OrbitCone, IsACurvatureConeButNotInvariantUnderQ) {
    const ConeSpec cone = make_orbit_cone(4, 32, 9);
    EXPECT_GT(cone.margin(CurvatureOperator::identity(4)), 0.0);
    Rng rng(41);
    const CurvatureOperator r = random_operator(4, rng);
    EXPECT_NEAR(cone.margin(3.0 * r), 3.0 * cone.margin(r), 1e-12 * r.norm());
}
