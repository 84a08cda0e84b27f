#pragma once

#include "curvlab/curvature.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace curvlab {

/// Orthogonal splitting R^n = E_1 + E_2 + ... with contiguous blocks, and
/// the induced partition of bivector indices into within-block families
/// (E_k ^ E_k) and cross-block families (E_k ^ E_l).
struct ProductSplitting {
    int n = 0;
    std::vector<int> blocks;
    /// families[f] lists the bivector indices of one family; within-block
    /// families come first, in block order, followed by cross families.
    std::vector<std::vector<int>> families;

    static ProductSplitting of(std::vector<int> blocks);

    int block_of(int coordinate) const;
};

/// Frobenius norm of the entries of m that couple two different families.
/// Zero iff every family spans an invariant subspace.
double family_leakage(const Matrix& m, const ProductSplitting& split);

/// kappa * Id, the space form of sectional curvature kappa. n >= 2.
CurvatureOperator constant_curvature(int n, double kappa);

/// Direct product: block sum, cross-block bivectors in the kernel. The first
/// factor occupies coordinates 0..p-1.
CurvatureOperator product(const CurvatureOperator& first, const CurvatureOperator& second);

/// S^{n-2}(1) x H^2(-1). Conformally flat; n >= 4.
CurvatureOperator sphere_times_hyperbolic(int n);

/// R^{n-2} x S^2(1). n >= 3.
CurvatureOperator flat_times_sphere(int n);

/// CP^m with holomorphic sectional curvature 4, on R^{2m}; m >= 2.
CurvatureOperator fubini_study(int m);

struct EinsteinFit {
    double lambda;
    double residual;  ///< |Ric - lambda id| / max(1, |R|)
};

EinsteinFit einstein_constant(const CurvatureOperator& r);

struct ModelParams {
    int dim = 4;
    double kappa = 1.0;
    std::vector<int> blocks;      ///< "product" only
    std::vector<double> kappas;   ///< "product" only, one per block
};

/// Registry: sphere, hyperbolic, sxh2, rxs2, s2xs2, cpm, product.
/// Throws std::invalid_argument for unknown names or bad parameters.
CurvatureOperator make_model(std::string_view name, const ModelParams& params);

const std::vector<std::string>& model_names();

}  // namespace curvlab
