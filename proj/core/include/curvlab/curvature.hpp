#pragma once

#include "curvlab/bivector.hpp"

#include <Eigen/Dense>

namespace curvlab {

/// Symmetric endomorphism of R^n (Ricci tensors, traceless Ricci, wedge factors).
struct SymTensor2 {
    Matrix mat;

    static SymTensor2 identity(int n) { return {Matrix::Identity(n, n)}; }
    static SymTensor2 zero(int n) { return {Matrix::Zero(n, n)}; }

    int n() const noexcept { return static_cast<int>(mat.rows()); }
    double trace() const { return mat.trace(); }
    double norm() const { return mat.norm(); }
    SymTensor2 traceless() const;
};

/// Algebraic curvature operator: a symmetric endomorphism of the exterior
/// square satisfying the first Bianchi identity, stored as an N x N matrix in
/// the lexicographic bivector basis.
///
/// Dimension 1 is allowed (N = 0) so that flat line factors can enter
/// products.
class CurvatureOperator {
public:
    static CurvatureOperator identity(int n);
    static CurvatureOperator zero(int n);

    /// Projects a symmetric matrix onto the Bianchi subspace. Throws
    /// std::invalid_argument if the matrix is not symmetric to 1e-12 relative.
    static CurvatureOperator from_matrix(int n, const Matrix& m);

    /// Wraps a matrix already known to satisfy Bianchi (closed-form
    /// constructions, outputs of q and friends). Not validated.
    static CurvatureOperator assume_valid(int n, Matrix m);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const noexcept { return mat_; }

    double trace() const { return mat_.trace(); }
    double norm() const { return mat_.norm(); }
    double inner(const CurvatureOperator& other) const;

    /// <R(e_a ^ e_b), e_c ^ e_d> for arbitrary 0-based indices.
    double entry(int a, int b, int c, int d) const;

    CurvatureOperator& operator+=(const CurvatureOperator& o);
    CurvatureOperator& operator-=(const CurvatureOperator& o);
    CurvatureOperator& operator*=(double s);

private:
    CurvatureOperator(int n, Matrix m) : n_(n), mat_(std::move(m)) {}

    int n_;
    Matrix mat_;
};

CurvatureOperator operator+(CurvatureOperator a, const CurvatureOperator& b);
CurvatureOperator operator-(CurvatureOperator a, const CurvatureOperator& b);
CurvatureOperator operator-(CurvatureOperator a);
CurvatureOperator operator*(double s, CurvatureOperator a);

/// Infers n from N = n(n-1)/2; throws if N is not of that form.
int dimension_from_bivector_dim(int N);

/// Largest |R(x^y,z^t) + R(z^x,y^t) + R(y^z,x^t)| over basis quadruples.
double bianchi_residual(int n, const Matrix& m);

/// Orthogonal projection of a symmetric matrix onto the Bianchi subspace,
/// removing the totally antisymmetric (4-form) component.
CurvatureOperator project_bianchi(const Matrix& s);

SymTensor2 ricci(const CurvatureOperator& r);

/// Twice the trace of the operator.
double scalar(const CurvatureOperator& r);

/// (A ^ B)(x ^ y) = 1/2 (Ax ^ By + Bx ^ Ay).
CurvatureOperator wedge_sym(const SymTensor2& a, const SymTensor2& b);

/// 2/(n-2) * A0 ^ id, the operator in S^2_0 ^ id whose Ricci tensor is A0.
CurvatureOperator from_traceless_ricci(const SymTensor2& a0);

struct Decomposition {
    CurvatureOperator r_id;
    CurvatureOperator r_0;
    CurvatureOperator r_w;
};

/// Splits R into its identity, traceless-Ricci and Weyl parts. n >= 3.
Decomposition decompose(const CurvatureOperator& r);

enum class Component { identity, traceless_ricci, weyl };

const char* to_string(Component c);

CurvatureOperator project_component(const CurvatureOperator& r, Component c);

/// Matrix of the map Lambda^2 g on bivectors: column (ij) holds g e_i ^ g e_j.
Matrix induced_action(const Matrix& g);

/// <g.R(x^y), z^t> = <R(gx^gy), gz^gt>.
CurvatureOperator act(const Matrix& g, const CurvatureOperator& r);
CurvatureOperator act_with(const Matrix& lambda2_g, const CurvatureOperator& r);
SymTensor2 act(const Matrix& g, const SymTensor2& a);

}  // namespace curvlab
