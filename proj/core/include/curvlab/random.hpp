#pragma once

#include "curvlab/curvature.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace curvlab {

/// Stable labeled seed splitting: one root seed reproduces a whole session.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t root, std::string_view label, std::uint64_t index = 0)
        : engine_(derive_seed(root, label, index)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool coin() { return (engine_() >> 63) != 0; }

    Matrix gaussian_matrix(int rows, int cols);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-distributed element of SO(n): QR of a Gaussian matrix with the
/// R-diagonal signs absorbed into Q, then a column flip when det < 0.
Matrix haar_special_orthogonal(int n, Rng& rng);

/// Haar-distributed element of O(n): an SO(n) sample composed with the
/// reflection diag(-1, 1, ..., 1) on an independent fair coin.
Matrix haar_orthogonal(int n, Rng& rng);

SymTensor2 random_symmetric(int n, Rng& rng);
SymTensor2 random_traceless(int n, Rng& rng);

/// Symmetric Gaussian matrix projected onto the Bianchi subspace, optionally
/// restricted to one irreducible component.
CurvatureOperator random_operator(int n, Rng& rng, std::optional<Component> component = std::nullopt);

}  // namespace curvlab
