#include "curvlab/errors.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/quadratic_flow.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace curvlab;

namespace {

Vector spectrum(const CurvatureOperator& r) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(r.mat(), Eigen::EigenvaluesOnly).eigenvalues();
}

double sectional(const CurvatureOperator& r, int a, int b) { return r.entry(a, b, a, b); }

}  // namespace

TEST(ModelSpaces, SpaceFormsHaveConstantSectionalCurvature) {
    for (double k : {1.0, -1.0, 0.5}) {
        const CurvatureOperator r = constant_curvature(5, k);
        EXPECT_LT((r - k * CurvatureOperator::identity(5)).norm(), 1e-15);
        EXPECT_DOUBLE_EQ(sectional(r, 1, 3), k);
    }
    ModelParams p;
    p.dim = 4;
    p.kappa = 2.0;
    EXPECT_DOUBLE_EQ(sectional(make_model("hyperbolic", p), 0, 1), -2.0);
    p.kappa = -1.0;
    EXPECT_LT((make_model("sphere", p) + CurvatureOperator::identity(4)).norm(), 1e-15);
}

TEST(ModelSpaces, ProductBlocksDoNotMix) {
    const CurvatureOperator r = product(constant_curvature(3, 2.0), constant_curvature(2, -1.0));
    EXPECT_EQ(r.n(), 5);
    EXPECT_LT(family_leakage(r.mat(), ProductSplitting::of({3, 2})), 1e-15);
    EXPECT_DOUBLE_EQ(sectional(r, 0, 1), 2.0);
    EXPECT_DOUBLE_EQ(sectional(r, 3, 4), -1.0);
    EXPECT_DOUBLE_EQ(sectional(r, 0, 4), 0.0);
    EXPECT_LT(oracle::cyclic_residual(r), 1e-15);
}

TEST(ModelSpaces, SplittingFamilies) {
    const ProductSplitting s = ProductSplitting::of({3, 2});
    ASSERT_EQ(s.families.size(), 3u);
    EXPECT_EQ(s.families[0].size(), 3u);
    EXPECT_EQ(s.families[1].size(), 1u);
    EXPECT_EQ(s.families[2].size(), 6u);
    EXPECT_EQ(s.block_of(4), 1);
}

TEST(ModelSpaces, SphereTimesHyperbolicIsConformallyFlat) {
    for (int n = 4; n <= 8; ++n) {
        const CurvatureOperator r = sphere_times_hyperbolic(n);
        const Decomposition d = decompose(r);
        EXPECT_LT(d.r_w.norm(), 1e-12) << "n=" << n;
        EXPECT_NEAR(scalar(r), (n - 2.0) * (n - 3.0) - 2.0, 1e-12);
        EXPECT_LT(family_leakage(r.mat(), ProductSplitting::of({n - 2, 2})), 1e-15);
    }
    EXPECT_THROW(sphere_times_hyperbolic(3), std::invalid_argument);
}

TEST(ModelSpaces, FlatTimesSphere) {
    const CurvatureOperator r = flat_times_sphere(5);
    const Vector ev = spectrum(r);
    EXPECT_NEAR(ev.maxCoeff(), 1.0, 1e-15);
    EXPECT_NEAR(r.trace(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(sectional(r, 3, 4), 1.0);
}

TEST(ModelSpaces, ComplexProjectivePlane) {
    const CurvatureOperator r = fubini_study(2);
    const Vector ev = spectrum(r);
    const double expected[] = {0, 0, 2, 2, 2, 6};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(ev[i], expected[i], 1e-12);
    EXPECT_LT((ricci(r).mat - 6.0 * Matrix::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LT((quadratic_term(r) - 6.0 * r).norm(), 1e-12);
    EXPECT_LT(oracle::cyclic_residual(r), 1e-14);
    // holomorphic sectional curvature 4, minimum sectional curvature 1
    EXPECT_NEAR(sectional(r, 0, 1), 4.0, 1e-14);
}

TEST(ModelSpaces, EinsteinSymmetricModelsAreFixedPoints) {
    ModelParams s3s3;
    s3s3.dim = 6;
    s3s3.blocks = {3, 3};
    s3s3.kappas = {1.0, 1.0};
    ModelParams cp3;
    cp3.dim = 6;
    for (const CurvatureOperator& r : {constant_curvature(5, 1.0), make_model("product", s3s3), make_model("cpm", cp3),
                                       make_model("s2xs2", ModelParams{})}) {
        const EinsteinFit fit = einstein_constant(r);
        EXPECT_LT(fit.residual, 1e-12);
        EXPECT_GT(fit.lambda, 0.0);
        EXPECT_LT((quadratic_term(r) - fit.lambda * r).norm(), 1e-10 * r.norm());
        EXPECT_GE(spectrum(r).minCoeff(), -1e-12);
    }
}

TEST(ModelSpaces, NonEinsteinResidual) {
    EXPECT_GT(einstein_constant(sphere_times_hyperbolic(5)).residual, 0.1);
    EXPECT_EQ(einstein_constant(CurvatureOperator::zero(4)).residual, 0.0);
}

TEST(ModelSpaces, RegistryRejectsBadParameters) {
    ModelParams p;
    p.dim = 7;
    EXPECT_THROW(make_model("cpm", p), std::invalid_argument);
    EXPECT_THROW(make_model("nope", ModelParams{}), std::invalid_argument);
    p.dim = 5;
    EXPECT_THROW(make_model("s2xs2", p), std::invalid_argument);
    p.blocks = {3, 3};
    p.kappas = {1.0, 1.0};
    EXPECT_THROW(make_model("product", p), std::invalid_argument);
    p.blocks = {4, 1};
    EXPECT_NO_THROW(make_model("product", p));
    for (const std::string& name : model_names()) {
        ModelParams q;
        q.dim = 4;
        q.blocks = {2, 2};
        q.kappas = {1.0, -1.0};
        EXPECT_NO_THROW(make_model(name, q)) << name;
    }
}
