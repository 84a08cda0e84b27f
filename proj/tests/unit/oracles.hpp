#pragma once

// Reference implementations written directly from the definitions, without
// going through the library's index tables or closed forms. Slow on purpose.

#include "curvlab/bivector.hpp"
#include "curvlab/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using curvlab::Matrix;
using curvlab::Vector;

// Position of e_i ^ e_j (i < j) found by walking the lexicographic order.
inline int pair_position(int n, int i, int j) {
    int k = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b, ++k)
            if (a == i && b == j) return k;
    return -1;
}

// R(a,b,c,d) = <R(e_a ^ e_b), e_c ^ e_d>
inline double tensor(const curvlab::CurvatureOperator& r, int a, int b, int c, int d) {
    if (a == b || c == d) return 0.0;
    const int s1 = a < b ? 1 : -1;
    const int s2 = c < d ? 1 : -1;
    const int p = pair_position(r.n(), std::min(a, b), std::max(a, b));
    const int q = pair_position(r.n(), std::min(c, d), std::max(c, d));
    return s1 * s2 * r.mat()(q, p);
}

inline Matrix ricci(const curvlab::CurvatureOperator& r) {
    const int n = r.n();
    Matrix out = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int i = 0; i < n; ++i) out(x, y) += tensor(r, x, i, y, i);
    return out;
}

inline double cyclic_residual(const curvlab::CurvatureOperator& r) {
    const int n = r.n();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    worst = std::max(worst, std::abs(tensor(r, a, b, c, d) + tensor(r, b, c, a, d) +
                                                     tensor(r, c, a, b, d)));
    return worst;
}

// <(A # B) eta, zeta> = 1/2 sum_{a,b} <[A phi_a, B phi_b], eta> <[phi_a, phi_b], zeta>,
// symmetrized in (A, B).
inline Matrix sharp(const Matrix& a, const Matrix& b, int n) {
    const int N = static_cast<int>(a.rows());
    std::vector<curvlab::Bivector> phi, aphi, bphi;
    for (int k = 0; k < N; ++k) {
        curvlab::Bivector e = curvlab::Bivector::zero(n);
        e.coords[k] = 1.0;
        phi.push_back(e);
        aphi.push_back({n, a.col(k)});
        bphi.push_back({n, b.col(k)});
    }
    Matrix out = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Vector ab = curvlab::bracket(aphi[i], bphi[j]).coords;
            const Vector ba = curvlab::bracket(bphi[i], aphi[j]).coords;
            const Vector pp = curvlab::bracket(phi[i], phi[j]).coords;
            out += 0.25 * (ab + ba) * pp.transpose();
        }
    return 0.5 * (out + out.transpose());
}

// (A ^ B)(x ^ y) = 1/2 (Ax ^ By + Bx ^ Ay)
inline Matrix kulkarni_nomizu(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.rows());
    const int N = n * (n - 1) / 2;
    Matrix out(N, N);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vector x = Vector::Unit(n, i), y = Vector::Unit(n, j);
            const Vector col = 0.5 * (curvlab::wedge(a * x, b * y).coords + curvlab::wedge(b * x, a * y).coords);
            out.col(pair_position(n, i, j)) = col;
        }
    return out;
}

// Hodge star on the exterior square of R^4: *(e_i ^ e_j) = eps_ijkl e_k ^ e_l.
inline Matrix hodge_star4() {
    auto perm_sign = [](std::array<int, 4> p) {
        int s = 1;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (p[i] > p[j]) s = -s;
        return s;
    };
    Matrix star = Matrix::Zero(6, 6);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            std::array<int, 4> p{i, j, 0, 0};
            int m = 2;
            for (int k = 0; k < 4; ++k)
                if (k != i && k != j) p[m++] = k;
            star(pair_position(4, p[2], p[3]), pair_position(4, i, j)) = perm_sign(p);
        }
    return star;
}

}  // namespace oracle
