#pragma once

#include <stdexcept>

namespace curvlab {

/// Raised when an operation is asked for a dimension it does not support
/// (e.g. isotropic curvature below n = 4).
class UnsupportedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace curvlab
