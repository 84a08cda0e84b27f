#include "curvlab/bivector.hpp"

#include <stdexcept>
#include <string>

namespace curvlab {

namespace {

void require_same_dim(int a, int b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

BivectorBasis::BivectorBasis(int n) : n_(n), dim_(bivector_dim(n)) {
    if (n < 2) {
        throw std::invalid_argument("BivectorBasis: n must be >= 2, got " + std::to_string(n));
    }
}

int BivectorBasis::index_of(int i, int j) const {
    if (i < 0 || j >= n_ || i >= j) {
        throw std::out_of_range("BivectorBasis::index_of: need 0 <= i < j < n");
    }
    // rows before i contribute (n-1) + (n-2) + ... + (n-i)
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> BivectorBasis::pair_of(int k) const {
    if (k < 0 || k >= dim_) throw std::out_of_range("BivectorBasis::pair_of");
    int i = 0;
    int row_len = n_ - 1;
    while (k >= row_len) {
        k -= row_len;
        ++i;
        --row_len;
    }
    return {i, i + 1 + k};
}

std::pair<int, int> BivectorBasis::signed_index(int i, int j) const {
    if (i == j) throw std::invalid_argument("BivectorBasis::signed_index: i == j");
    return i < j ? std::pair{index_of(i, j), 1} : std::pair{index_of(j, i), -1};
}

Bivector Bivector::zero(int n) { return Bivector{n, Vector::Zero(bivector_dim(n))}; }

Bivector Bivector::unit(int n, int i, int j) {
    Bivector b = zero(n);
    auto [k, s] = BivectorBasis(n).signed_index(i, j);
    b.coords[k] = s;
    return b;
}

double Bivector::dot(const Bivector& other) const {
    require_same_dim(n, other.n, "Bivector::dot");
    return coords.dot(other.coords);
}

Bivector& Bivector::operator+=(const Bivector& o) {
    require_same_dim(n, o.n, "Bivector::operator+=");
    coords += o.coords;
    return *this;
}

Bivector& Bivector::operator-=(const Bivector& o) {
    require_same_dim(n, o.n, "Bivector::operator-=");
    coords -= o.coords;
    return *this;
}

Bivector& Bivector::operator*=(double s) {
    coords *= s;
    return *this;
}

Bivector operator+(Bivector a, const Bivector& b) { return a += b; }
Bivector operator-(Bivector a, const Bivector& b) { return a -= b; }
Bivector operator*(double s, Bivector a) { return a *= s; }

Bivector wedge(const Vector& x, const Vector& y) {
    require_same_dim(static_cast<int>(x.size()), static_cast<int>(y.size()), "wedge");
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("wedge: n must be >= 2");
    Bivector b = Bivector::zero(n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) b.coords[k++] = x[i] * y[j] - x[j] * y[i];
    }
    return b;
}

Matrix bivector_to_skew(const Bivector& b) {
    const int n = b.n;
    Matrix m = Matrix::Zero(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++k) {
            // e_i ^ e_j sends e_i to e_j and e_j to -e_i
            m(j, i) = b.coords[k];
            m(i, j) = -b.coords[k];
        }
    }
    return m;
}

Bivector skew_to_bivector(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("skew_to_bivector: matrix not square");
    const int n = static_cast<int>(m.rows());
    Bivector b = Bivector::zero(n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) b.coords[k++] = 0.5 * (m(j, i) - m(i, j));
    }
    return b;
}

Bivector bracket(const Bivector& a, const Bivector& b) {
    require_same_dim(a.n, b.n, "bracket");
    const Matrix ma = bivector_to_skew(a);
    const Matrix mb = bivector_to_skew(b);
    return skew_to_bivector(ma * mb - mb * ma);
}

}  // namespace curvlab
