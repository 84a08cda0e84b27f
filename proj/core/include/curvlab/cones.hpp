#pragma once

#include "curvlab/curvature.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curvlab {

enum class Certification { exact, heuristic };

const char* to_string(Certification c);

struct MarginEval {
    double value = 0.0;
    Certification certification = Certification::exact;
    /// Minimizing orthonormal 4-frame (columns) for the isotropic-curvature
    /// family, in the augmented dimension for pic1 / pic2.
    std::optional<Matrix> witness_frame;
};

/// A curvature cone given by a 1-homogeneous signed margin: positive inside,
/// zero on the boundary, negative outside.
struct ConeSpec {
    using MarginFn = std::function<MarginEval(const CurvatureOperator&)>;
    /// First-order change of the margin at a point along a direction, when an
    /// analytic expression is available.
    using SlopeFn = std::function<std::optional<double>(const CurvatureOperator& at,
                                                        const CurvatureOperator& along)>;

    std::string name;
    int n = 0;
    Certification certification = Certification::exact;
    MarginFn evaluate;
    SlopeFn first_order;

    MarginEval eval(const CurvatureOperator& r) const;
    double margin(const CurvatureOperator& r) const { return eval(r).value; }
};

// --- margins -------------------------------------------------------------

/// trace(R) / sqrt(N), so that the identity has margin sqrt(N).
double margin_scal(const CurvatureOperator& r);
/// Smallest eigenvalue of R on the exterior square.
double margin_nn_operator(const CurvatureOperator& r);
/// Sum of the two smallest eigenvalues.
double margin_2nn(const CurvatureOperator& r);
/// Smallest eigenvalue of the Ricci tensor.
double margin_nn_ricci(const CurvatureOperator& r);

/// R_1313 + R_1414 + R_2323 + R_2424 - 2 R_1234 for the orthonormal frame
/// given by the four columns of `frame`.
double isotropic_curvature(const CurvatureOperator& r, const Matrix& frame);

struct PicOptions {
    int starts = 64;
    std::uint64_t seed = 0;
    int max_iterations = 4000;
    double decrease_tol = 1e-12;
};

struct FrameMinimum {
    double value = 0.0;
    Matrix frame;
};

/// Multi-start Riemannian descent of the isotropic-curvature functional over
/// orthonormal 4-frames with QR retraction. An upper bound on the true
/// minimum; a negative value is certified by its frame. Requires n >= 4.
FrameMinimum margin_pic(const CurvatureOperator& r, const PicOptions& options = {});
/// PIC of R x R^1 and R x R^2. Require n >= 3.
FrameMinimum margin_pic1(const CurvatureOperator& r, const PicOptions& options = {});
FrameMinimum margin_pic2(const CurvatureOperator& r, const PicOptions& options = {});

/// Margin of base at R_Id + R_W (the traceless-Ricci part is dropped). n = 4.
double margin_dim4_construction(const ConeSpec& base, const CurvatureOperator& r);

// --- registry ------------------------------------------------------------

struct ConeOptions {
    PicOptions pic;
    int orbit_size = 32;
    std::uint64_t orbit_seed = 0;
};

/// Names: scal, nno, 2nn, pic, pic1, pic2, nnricci, dim4:<base>, orbit.
ConeSpec make_cone(std::string_view name, int n, const ConeOptions& options = {});

ConeSpec make_dim4_cone(const ConeSpec& base);

/// Intersection of the half-spaces {<g_k.H, R> >= 0} over a fixed sample of
/// group elements g_k; not Ricci-flow invariant in general.
ConeSpec make_orbit_cone(int n, int orbit_size, std::uint64_t seed);

const std::vector<std::string>& cone_names();

// --- geometry ------------------------------------------------------------

struct BoundaryOptions {
    double tol = 1e-9;
    double cap = 1e6;
};

struct BoundaryPoint {
    bool recession = false;
    double tau = 0.0;
    /// On the inner side of the boundary: 0 <= margin <= tol (1 + |R_b|).
    std::optional<CurvatureOperator> point;
};

/// Last point of the ray t -> Id + t (X - Id) inside the cone, by geometric
/// bracketing and bisection. Throws std::invalid_argument if Id is not
/// strictly inside.
BoundaryPoint boundary_point(const ConeSpec& cone, const CurvatureOperator& x,
                             const BoundaryOptions& options = {});

struct ProbeOptions {
    std::vector<double> h_factors{1e-2, 1e-3, 1e-4};
    double slope_tol = 1e-6;
    double boundary_tol = 1e-9;
};

struct TangentProbe {
    /// max over h of margin(R_b + h V) / h.
    double slope_margin = 0.0;
    std::optional<double> first_order_slope;
    bool accepted = false;
};

/// Throws std::invalid_argument if R_b is not on the boundary.
TangentProbe tangent_probe(const ConeSpec& cone, const CurvatureOperator& rb,
                           const CurvatureOperator& v, const ProbeOptions& options = {});

struct LinealityReport {
    std::array<bool, 3> in_lineality{};   ///< indexed by Component
    std::array<double, 3> worst_margin{}; ///< min over generators of margin(+-G)
    std::string cone_class;
    bool heuristic = false;
    int trials = 0;

    bool flagged(Component c) const { return in_lineality[static_cast<int>(c)]; }
};

/// Component-level test of which irreducible summands lie in the maximal
/// vector subspace of the cone.
LinealityReport lineality_space(const ConeSpec& cone, int trials, std::uint64_t seed,
                                double tol = 1e-8);

/// Monte-Carlo average of g.R over Haar-random g in O(n).
CurvatureOperator haar_average(const CurvatureOperator& r, int samples, std::uint64_t seed);

struct BoundednessProbe {
    int rays = 0;
    int unbounded = 0;          ///< rays still inside at the cap
    double max_exit_parameter = 0.0;
};

/// Shoots rays from Id/N inside {tr R <= 1} along directions with
/// nonpositive trace and counts those that never leave the cone.
BoundednessProbe probe_trace_slice(const ConeSpec& cone, int rays, std::uint64_t seed,
                                   double cap = 1e6);

}  // namespace curvlab
