#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace curvlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lexicographic basis e_i ^ e_j (i < j) of the exterior square of R^n.
///
/// Indices are 0-based in storage: (0,1) -> 0, ..., (n-2,n-1) -> N-1 with
/// N = n(n-1)/2. The basis is orthonormal for the inner product induced by
/// <x^y, z^t> = <x,z><y,t> - <x,t><y,z>.
class BivectorBasis {
public:
    explicit BivectorBasis(int n);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }

    /// Requires 0 <= i < j < n.
    int index_of(int i, int j) const;
    std::pair<int, int> pair_of(int k) const;

    /// Index and orientation sign of e_i ^ e_j for any i != j.
    std::pair<int, int> signed_index(int i, int j) const;

    friend bool operator==(const BivectorBasis&, const BivectorBasis&) = default;

private:
    int n_;
    int dim_;
};

constexpr int bivector_dim(int n) noexcept { return n * (n - 1) / 2; }

/// Element of the exterior square, doubling as an element of so(n).
struct Bivector {
    int n = 2;
    Vector coords;

    static Bivector zero(int n);
    static Bivector unit(int n, int i, int j);

    double norm() const { return coords.norm(); }
    double dot(const Bivector& other) const;

    Bivector& operator+=(const Bivector& o);
    Bivector& operator-=(const Bivector& o);
    Bivector& operator*=(double s);
};

Bivector operator+(Bivector a, const Bivector& b);
Bivector operator-(Bivector a, const Bivector& b);
Bivector operator*(double s, Bivector a);

/// coords[index_of(i,j)] = x_i y_j - x_j y_i.
Bivector wedge(const Vector& x, const Vector& y);

/// x ^ y  ->  (u -> <x,u> y - <y,u> x). No sqrt(2) normalization: the
/// Frobenius norm of the image is sqrt(2) times the bivector norm.
Matrix bivector_to_skew(const Bivector& b);

/// Exact inverse of bivector_to_skew; the input is antisymmetrized first.
Bivector skew_to_bivector(const Matrix& m);

/// Lie bracket transported from the matrix commutator on so(n).
Bivector bracket(const Bivector& a, const Bivector& b);

}  // namespace curvlab
