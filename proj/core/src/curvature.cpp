#include "curvlab/curvature.hpp"

#include "curvlab/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curvlab {

namespace {

void require_same_n(int a, int b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

// Reads <S(e_a ^ e_b), e_c ^ e_d> from a matrix in the lexicographic basis.
double tensor_entry(const BivectorBasis& basis, const Matrix& s, int a, int b, int c, int d) {
    if (a == b || c == d) return 0.0;
    auto [p, sp] = basis.signed_index(a, b);
    auto [q, sq] = basis.signed_index(c, d);
    return sp * sq * s(p, q);
}

bool is_symmetric(const Matrix& m, double rel_tol) {
    return (m - m.transpose()).norm() <= rel_tol * std::max(1.0, m.norm());
}

}  // namespace

SymTensor2 SymTensor2::traceless() const {
    SymTensor2 out = *this;
    out.mat.diagonal().array() -= mat.trace() / n();
    return out;
}

CurvatureOperator CurvatureOperator::identity(int n) {
    if (n < 1) throw std::invalid_argument("CurvatureOperator: n must be >= 1");
    const int N = bivector_dim(n);
    return {n, Matrix::Identity(N, N)};
}

CurvatureOperator CurvatureOperator::zero(int n) {
    if (n < 1) throw std::invalid_argument("CurvatureOperator: n must be >= 1");
    const int N = bivector_dim(n);
    return {n, Matrix::Zero(N, N)};
}

CurvatureOperator CurvatureOperator::from_matrix(int n, const Matrix& m) {
    if (m.rows() != bivector_dim(n) || m.cols() != bivector_dim(n)) {
        throw std::invalid_argument("CurvatureOperator::from_matrix: expected a " +
                                    std::to_string(bivector_dim(n)) + "x" +
                                    std::to_string(bivector_dim(n)) + " matrix for n = " +
                                    std::to_string(n));
    }
    if (n < 4) {
        // no 4-forms below dimension 4
        if (!is_symmetric(m, 1e-12)) {
            throw std::invalid_argument("CurvatureOperator::from_matrix: matrix is not symmetric");
        }
        return {n, 0.5 * (m + m.transpose())};
    }
    return project_bianchi(m);
}

CurvatureOperator CurvatureOperator::assume_valid(int n, Matrix m) {
    if (m.rows() != bivector_dim(n) || m.cols() != bivector_dim(n)) {
        throw std::invalid_argument("CurvatureOperator::assume_valid: shape does not match n");
    }
    return {n, std::move(m)};
}

double CurvatureOperator::inner(const CurvatureOperator& other) const {
    require_same_n(n_, other.n_, "CurvatureOperator::inner");
    return mat_.cwiseProduct(other.mat_).sum();
}

double CurvatureOperator::entry(int a, int b, int c, int d) const {
    if (n_ < 2) return 0.0;
    return tensor_entry(BivectorBasis(n_), mat_, a, b, c, d);
}

CurvatureOperator& CurvatureOperator::operator+=(const CurvatureOperator& o) {
    require_same_n(n_, o.n_, "CurvatureOperator::operator+=");
    mat_ += o.mat_;
    return *this;
}

CurvatureOperator& CurvatureOperator::operator-=(const CurvatureOperator& o) {
    require_same_n(n_, o.n_, "CurvatureOperator::operator-=");
    mat_ -= o.mat_;
    return *this;
}

CurvatureOperator& CurvatureOperator::operator*=(double s) {
    mat_ *= s;
    return *this;
}

CurvatureOperator operator+(CurvatureOperator a, const CurvatureOperator& b) { return a += b; }
CurvatureOperator operator-(CurvatureOperator a, const CurvatureOperator& b) { return a -= b; }
CurvatureOperator operator-(CurvatureOperator a) { return a *= -1.0; }
CurvatureOperator operator*(double s, CurvatureOperator a) { return a *= s; }

int dimension_from_bivector_dim(int N) {
    for (int n = 1; bivector_dim(n) <= N; ++n) {
        if (bivector_dim(n) == N) return n;
    }
    throw std::invalid_argument("bivector dimension " + std::to_string(N) +
                                " is not of the form n(n-1)/2");
}

double bianchi_residual(int n, const Matrix& m) {
    if (n < 3) return 0.0;
    const BivectorBasis basis(n);
    double worst = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                for (int t = 0; t < n; ++t) {
                    const double cyc = tensor_entry(basis, m, x, y, z, t) +
                                       tensor_entry(basis, m, z, x, y, t) +
                                       tensor_entry(basis, m, y, z, x, t);
                    worst = std::max(worst, std::abs(cyc));
                }
    return worst;
}

CurvatureOperator project_bianchi(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("project_bianchi: matrix not square");
    if (!is_symmetric(s, 1e-12)) throw std::invalid_argument("project_bianchi: matrix is not symmetric");
    const int n = dimension_from_bivector_dim(static_cast<int>(s.rows()));
    Matrix out = 0.5 * (s + s.transpose());
    if (n < 4) return CurvatureOperator::assume_valid(n, std::move(out));

    const BivectorBasis basis(n);
    const int N = basis.dim();
    const Matrix sym = out;
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pair_of(p);
        for (int q = 0; q < N; ++q) {
            auto [k, l] = basis.pair_of(q);
            if (k == i || k == j || l == i || l == j) continue;
            // restricted to S^2(Lambda^2), the cyclic average equals the full
            // antisymmetrization
            const double alt = (tensor_entry(basis, sym, i, j, k, l) +
                                tensor_entry(basis, sym, i, k, l, j) +
                                tensor_entry(basis, sym, i, l, j, k)) /
                               3.0;
            out(p, q) -= alt;
        }
    }
    return CurvatureOperator::assume_valid(n, std::move(out));
}

SymTensor2 ricci(const CurvatureOperator& r) {
    const int n = r.n();
    SymTensor2 ric = SymTensor2::zero(n);
    if (n < 2) return ric;
    const BivectorBasis basis(n);
    for (int x = 0; x < n; ++x)
        for (int y = x; y < n; ++y) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += tensor_entry(basis, r.mat(), x, i, y, i);
            ric.mat(x, y) = acc;
            ric.mat(y, x) = acc;
        }
    return ric;
}

double scalar(const CurvatureOperator& r) { return 2.0 * r.trace(); }

CurvatureOperator wedge_sym(const SymTensor2& a, const SymTensor2& b) {
    require_same_n(a.n(), b.n(), "wedge_sym");
    const int n = a.n();
    if (n < 2) return CurvatureOperator::zero(n);
    const BivectorBasis basis(n);
    const int N = basis.dim();
    const Matrix& A = a.mat;
    const Matrix& B = b.mat;
    Matrix w(N, N);
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pair_of(p);
        for (int q = 0; q < N; ++q) {
            auto [k, l] = basis.pair_of(q);
            w(q, p) = 0.5 * (A(k, i) * B(l, j) - A(l, i) * B(k, j) + B(k, i) * A(l, j) -
                             B(l, i) * A(k, j));
        }
    }
    return CurvatureOperator::assume_valid(n, std::move(w));
}

CurvatureOperator from_traceless_ricci(const SymTensor2& a0) {
    const int n = a0.n();
    if (n < 3) throw UnsupportedError("from_traceless_ricci: requires n >= 3");
    if (std::abs(a0.trace()) > 1e-10 * std::max(a0.norm(), 1e-300)) {
        throw std::invalid_argument("from_traceless_ricci: input has nonzero trace " +
                                    std::to_string(a0.trace()));
    }
    return (2.0 / (n - 2)) * wedge_sym(a0, SymTensor2::identity(n));
}

Decomposition decompose(const CurvatureOperator& r) {
    const int n = r.n();
    if (n < 3) throw UnsupportedError("decompose: requires n >= 3");
    const int N = r.dim();
    CurvatureOperator r_id = (r.trace() / N) * CurvatureOperator::identity(n);
    // traceless() is exact up to rounding, so skip the trace check here
    CurvatureOperator r_0 = (2.0 / (n - 2)) * wedge_sym(ricci(r).traceless(), SymTensor2::identity(n));
    CurvatureOperator r_w = r - r_id - r_0;
    return {std::move(r_id), std::move(r_0), std::move(r_w)};
}

const char* to_string(Component c) {
    switch (c) {
        case Component::identity: return "Id";
        case Component::traceless_ricci: return "Ric0";
        case Component::weyl: return "Weyl";
    }
    return "?";
}

CurvatureOperator project_component(const CurvatureOperator& r, Component c) {
    Decomposition d = decompose(r);
    switch (c) {
        case Component::identity: return d.r_id;
        case Component::traceless_ricci: return d.r_0;
        case Component::weyl: return d.r_w;
    }
    throw std::invalid_argument("project_component: unknown component");
}

Matrix induced_action(const Matrix& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("induced_action: matrix not square");
    const int n = static_cast<int>(g.rows());
    const int N = bivector_dim(n);
    Matrix lam(N, N);
    if (N == 0) return lam;
    const BivectorBasis basis(n);
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pair_of(p);
        for (int q = 0; q < N; ++q) {
            auto [k, l] = basis.pair_of(q);
            lam(q, p) = g(k, i) * g(l, j) - g(l, i) * g(k, j);
        }
    }
    return lam;
}

CurvatureOperator act_with(const Matrix& lambda2_g, const CurvatureOperator& r) {
    if (lambda2_g.rows() != r.dim()) throw std::invalid_argument("act: dimension mismatch");
    return CurvatureOperator::assume_valid(r.n(), lambda2_g.transpose() * r.mat() * lambda2_g);
}

CurvatureOperator act(const Matrix& g, const CurvatureOperator& r) {
    require_same_n(static_cast<int>(g.rows()), r.n(), "act");
    return act_with(induced_action(g), r);
}

SymTensor2 act(const Matrix& g, const SymTensor2& a) {
    require_same_n(static_cast<int>(g.rows()), a.n(), "act");
    return {g.transpose() * a.mat * g};
}

}  // namespace curvlab
