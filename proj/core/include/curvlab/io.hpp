#pragma once

#include "curvlab/cones.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/invariance_lab.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace curvlab {

/// Malformed or unreadable operator / report file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedOperator {
    CurvatureOperator op;
    double asymmetry = 0.0;        ///< max |m - m^T| of the stored matrix
    double bianchi_residual = 0.0; ///< before projection
};

/// {"n": n, "mat": upper triangle of the bivector matrix, row-major}
std::string operator_to_json(const CurvatureOperator& r);
LoadedOperator operator_from_json(const std::string& text);

LoadedOperator read_operator_file(const std::filesystem::path& path);
void write_operator_file(const std::filesystem::path& path, const CurvatureOperator& r);

/// Writes to a sibling temporary and renames it over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json operator_json(const CurvatureOperator& r);
nlohmann::json to_json(const VerificationResult& r);
nlohmann::json to_json(const InvarianceReport& r);
nlohmann::json to_json(const Dim4ConeReport& r);
nlohmann::json to_json(const LinealityReport& r, const std::string& cone, int n);

}  // namespace curvlab
