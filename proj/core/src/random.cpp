#include "curvlab/random.hpp"

namespace curvlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(splitmix64(root ^ h) + index);
}

Matrix Rng::gaussian_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
}

Matrix haar_special_orthogonal(int n, Rng& rng) {
    const Matrix a = rng.gaussian_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

Matrix haar_orthogonal(int n, Rng& rng) {
    Matrix g = haar_special_orthogonal(n, rng);
    if (rng.coin()) g.col(0) *= -1.0;
    return g;
}

SymTensor2 random_symmetric(int n, Rng& rng) {
    const Matrix a = rng.gaussian_matrix(n, n);
    return {0.5 * (a + a.transpose())};
}

SymTensor2 random_traceless(int n, Rng& rng) { return random_symmetric(n, rng).traceless(); }

CurvatureOperator random_operator(int n, Rng& rng, std::optional<Component> component) {
    const int N = bivector_dim(n);
    const Matrix a = rng.gaussian_matrix(N, N);
    CurvatureOperator r = CurvatureOperator::from_matrix(n, 0.5 * (a + a.transpose()));
    if (component) return project_component(r, *component);
    return r;
}

}  // namespace curvlab
