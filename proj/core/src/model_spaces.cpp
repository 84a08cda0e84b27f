#include "curvlab/model_spaces.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace curvlab {

ProductSplitting ProductSplitting::of(std::vector<int> blocks) {
    ProductSplitting s;
    for (int b : blocks) {
        if (b < 1) throw std::invalid_argument("ProductSplitting: block sizes must be >= 1");
    }
    s.n = std::accumulate(blocks.begin(), blocks.end(), 0);
    s.blocks = std::move(blocks);
    if (s.n < 2) throw std::invalid_argument("ProductSplitting: total dimension must be >= 2");
    const int B = static_cast<int>(s.blocks.size());
    const BivectorBasis basis(s.n);
    // family id for (block u, block v), u <= v
    auto family_id = [B](int u, int v) {
        return u == v ? u : B + (u * (2 * B - u - 1)) / 2 + (v - u - 1);
    };
    s.families.assign(B + B * (B - 1) / 2, {});
    for (int k = 0; k < basis.dim(); ++k) {
        auto [i, j] = basis.pair_of(k);
        s.families[family_id(s.block_of(i), s.block_of(j))].push_back(k);
    }
    return s;
}

int ProductSplitting::block_of(int coordinate) const {
    int start = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (coordinate < start + blocks[b]) return static_cast<int>(b);
        start += blocks[b];
    }
    throw std::out_of_range("ProductSplitting::block_of");
}

double family_leakage(const Matrix& m, const ProductSplitting& split) {
    std::vector<int> family_of(m.rows(), -1);
    for (std::size_t f = 0; f < split.families.size(); ++f)
        for (int k : split.families[f]) family_of[k] = static_cast<int>(f);
    double acc = 0.0;
    for (int p = 0; p < m.rows(); ++p)
        for (int q = 0; q < m.cols(); ++q)
            if (family_of[p] != family_of[q]) acc += m(p, q) * m(p, q);
    return std::sqrt(acc);
}

CurvatureOperator constant_curvature(int n, double kappa) {
    if (n < 2) throw std::invalid_argument("constant_curvature: n must be >= 2");
    return kappa * CurvatureOperator::identity(n);
}

CurvatureOperator product(const CurvatureOperator& first, const CurvatureOperator& second) {
    const int p = first.n();
    const int q = second.n();
    const int n = p + q;
    const BivectorBasis basis(n);
    Matrix m = Matrix::Zero(basis.dim(), basis.dim());

    std::vector<int> embed_first(first.dim());
    for (int k = 0; k < first.dim(); ++k) {
        auto [i, j] = BivectorBasis(p).pair_of(k);
        embed_first[k] = basis.index_of(i, j);
    }
    std::vector<int> embed_second(second.dim());
    for (int k = 0; k < second.dim(); ++k) {
        auto [i, j] = BivectorBasis(q).pair_of(k);
        embed_second[k] = basis.index_of(i + p, j + p);
    }
    for (int a = 0; a < first.dim(); ++a)
        for (int b = 0; b < first.dim(); ++b) m(embed_first[a], embed_first[b]) = first.mat()(a, b);
    for (int a = 0; a < second.dim(); ++a)
        for (int b = 0; b < second.dim(); ++b)
            m(embed_second[a], embed_second[b]) = second.mat()(a, b);
    return CurvatureOperator::assume_valid(n, std::move(m));
}

CurvatureOperator sphere_times_hyperbolic(int n) {
    if (n < 4) throw std::invalid_argument("sphere_times_hyperbolic: n must be >= 4");
    return product(constant_curvature(n - 2, 1.0), constant_curvature(2, -1.0));
}

CurvatureOperator flat_times_sphere(int n) {
    if (n < 3) throw std::invalid_argument("flat_times_sphere: n must be >= 3");
    return product(CurvatureOperator::zero(n - 2), constant_curvature(2, 1.0));
}

CurvatureOperator fubini_study(int m) {
    if (m < 2) throw std::invalid_argument("fubini_study: complex dimension must be >= 2");
    const int n = 2 * m;
    Matrix J = Matrix::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        J(2 * k + 1, 2 * k) = 1.0;
        J(2 * k, 2 * k + 1) = -1.0;
    }
    const BivectorBasis basis(n);
    const int N = basis.dim();
    // R(x^y) = x^y + Jx^Jy + 2 <Jx,y> omega, omega the Kahler bivector:
    // sectional curvature 1 + 3<Jx,y>^2
    Matrix jj(N, N);
    Vector omega(N);
    for (int p = 0; p < N; ++p) {
        auto [i, j] = basis.pair_of(p);
        jj.col(p) = wedge(J.col(i), J.col(j)).coords;
        omega[p] = J(j, i);
    }
    Matrix r = Matrix::Identity(N, N) + jj + 2.0 * omega * omega.transpose();
    return CurvatureOperator::assume_valid(n, std::move(r));
}

EinsteinFit einstein_constant(const CurvatureOperator& r) {
    const SymTensor2 ric = ricci(r);
    const double lambda = ric.trace() / r.n();
    const double residual = (ric.mat - lambda * Matrix::Identity(r.n(), r.n())).norm() /
                            std::max(1.0, r.norm());
    return {lambda, residual};
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names{"sphere", "hyperbolic", "sxh2", "rxs2",
                                                "s2xs2",  "cpm",        "product"};
    return names;
}

CurvatureOperator make_model(std::string_view name, const ModelParams& params) {
    const int n = params.dim;
    if (name == "sphere") return constant_curvature(n, params.kappa);
    if (name == "hyperbolic") return constant_curvature(n, -std::abs(params.kappa));
    if (name == "sxh2") return sphere_times_hyperbolic(n);
    if (name == "rxs2") return flat_times_sphere(n);
    if (name == "s2xs2") {
        if (n != 4) throw std::invalid_argument("s2xs2: dimension must be 4");
        return product(constant_curvature(2, 1.0), constant_curvature(2, 1.0));
    }
    if (name == "cpm") {
        if (n < 4 || n % 2 != 0) throw std::invalid_argument("cpm: dimension must be even and >= 4");
        return fubini_study(n / 2);
    }
    if (name == "product") {
        if (params.blocks.empty()) throw std::invalid_argument("product: no blocks given");
        if (!params.kappas.empty() && params.kappas.size() != params.blocks.size()) {
            throw std::invalid_argument("product: need one curvature per block");
        }
        auto factor = [&](std::size_t b) {
            const double k = params.kappas.empty() ? 1.0 : params.kappas[b];
            const int d = params.blocks[b];
            if (d < 1) throw std::invalid_argument("product: block sizes must be >= 1");
            return d == 1 ? CurvatureOperator::zero(1) : constant_curvature(d, k);
        };
        CurvatureOperator acc = factor(0);
        for (std::size_t b = 1; b < params.blocks.size(); ++b) acc = product(acc, factor(b));
        if (acc.n() != n && params.dim != 0) {
            throw std::invalid_argument("product: block sizes sum to " + std::to_string(acc.n()) +
                                        ", not --dim " + std::to_string(n));
        }
        return acc;
    }
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

}  // namespace curvlab
