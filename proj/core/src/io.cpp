#include "curvlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace curvlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

// Symmetric matrix from its upper triangle; reports max |m - m^T| of the
// input when it is given as a full matrix.
Matrix unpack(const json& mat, int dim, double& asymmetry) {
    if (!mat.is_array()) throw FormatError("'mat' must be an array");
    const std::size_t packed = static_cast<std::size_t>(dim) * (dim + 1) / 2;
    Matrix m(dim, dim);
    asymmetry = 0.0;
    if (mat.size() == packed && (mat.empty() || mat[0].is_number())) {
        std::size_t k = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j, ++k) {
                if (!mat[k].is_number()) throw FormatError("'mat' entry " + std::to_string(k) + " is not a number");
                m(i, j) = m(j, i) = mat[k].get<double>();
            }
        return m;
    }
    if (mat.size() == static_cast<std::size_t>(dim)) {
        for (int i = 0; i < dim; ++i) {
            const json& row = mat[i];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
                throw FormatError("'mat' row " + std::to_string(i) + " has the wrong length");
            for (int j = 0; j < dim; ++j) {
                if (!row[j].is_number()) throw FormatError("'mat' entry (" + std::to_string(i) + "," +
                                                           std::to_string(j) + ") is not a number");
                m(i, j) = row[j].get<double>();
            }
        }
        asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
        m = 0.5 * (m + m.transpose());
        return m;
    }
    throw FormatError("'mat' has " + std::to_string(mat.size()) + " entries, expected " + std::to_string(packed) +
                      " (upper triangle) or " + std::to_string(dim) + " rows");
}

json map_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

}  // namespace

std::string operator_to_json(const CurvatureOperator& r) {
    std::ostringstream out;
    out << "{\"n\": " << r.n() << ", \"mat\": [";
    const Matrix& m = r.mat();
    bool first = true;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) {
            out << (first ? "" : ", ") << format_double(m(i, j));
            first = false;
        }
    out << "]}\n";
    return out.str();
}

LoadedOperator operator_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw FormatError("operator file must hold a JSON object");
    if (!doc.contains("n") || !doc["n"].is_number_integer()) throw FormatError("missing integer field 'n'");
    if (!doc.contains("mat")) throw FormatError("missing field 'mat'");
    const int n = doc["n"].get<int>();
    if (n < 2) throw FormatError("'n' must be at least 2");
    const int dim = bivector_dim(n);
    double asymmetry = 0.0;
    const Matrix m = unpack(doc["mat"], dim, asymmetry);
    if (!m.allFinite()) throw FormatError("'mat' contains non-finite values");
    const double residual = bianchi_residual(n, m);
    // keep the stored bits when the file already satisfies Bianchi to rounding
    const bool exact = asymmetry == 0.0 && residual <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff());
    return {exact ? CurvatureOperator::assume_valid(n, m) : CurvatureOperator::from_matrix(n, m), asymmetry,
            residual};
}

LoadedOperator read_operator_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw FormatError(path.string() + " is empty");
    try {
        return operator_from_json(text);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

void write_operator_file(const fs::path& path, const CurvatureOperator& r) {
    write_text_atomic(path, operator_to_json(r));
}

json operator_json(const CurvatureOperator& r) { return json::parse(operator_to_json(r)); }

json to_json(const VerificationResult& r) {
    json j;
    j["check"] = r.check;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["residuals"] = map_json(r.residuals);
    j["constants"] = map_json(r.constants);
    if (r.witness) j["witness"] = operator_json(*r.witness);
    if (r.witness_frame) {
        json frame = json::array();
        for (int i = 0; i < r.witness_frame->rows(); ++i) {
            json row = json::array();
            for (int k = 0; k < r.witness_frame->cols(); ++k) row.push_back((*r.witness_frame)(i, k));
            frame.push_back(row);
        }
        j["witness_frame"] = frame;
    }
    j["verdict"] = to_string(r.verdict);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const InvarianceReport& r) {
    json j;
    j["check"] = "invariance";
    j["cone"] = r.cone;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["trials"] = r.samples;
    j["residuals"] = {{"min_slope", r.min_slope}, {"mean_slope", r.mean_slope}};
    j["constants"] = {{"evaluated", r.evaluated},
                      {"recession_skipped", r.recession_skipped},
                      {"off_boundary_skipped", r.off_boundary_skipped},
                      {"rejected", r.rejected}};
    j["tolerances"] = map_json(r.tolerances.as_map());
    if (r.worst) {
        json w;
        w["boundary_point"] = operator_json(r.worst->boundary_point);
        w["q"] = operator_json(r.worst->q_value);
        w["slope_margin"] = r.worst->slope_margin;
        w["revalidated_slope"] = r.worst->revalidated_slope;
        if (r.worst->first_order_slope) w["first_order_slope"] = *r.worst->first_order_slope;
        j["witness"] = w;
    }
    j["verdict"] = to_string(r.verdict);
    if (!r.note.empty()) j["note"] = r.note;
    j["metadata"] = {{"wall_time_s", r.wall_time_s}};
    return j;
}

json to_json(const Dim4ConeReport& r) {
    json j;
    j["check"] = "dim4-cone";
    j["cone"] = r.invariance.cone;
    j["n"] = 4;
    j["seed"] = r.invariance.seed;
    j["invariance"] = to_json(r.invariance);
    j["containment"] = to_json(r.containment);
    j["verdict"] = to_string(r.verdict);
    return j;
}

json to_json(const LinealityReport& r, const std::string& cone, int n) {
    static const char* names[] = {"Id", "Ric0", "Weyl"};
    json j;
    j["check"] = "lineality";
    j["cone"] = cone;
    j["n"] = n;
    j["trials"] = r.trials;
    for (int c = 0; c < 3; ++c) {
        j["lineality"][names[c]] = r.in_lineality[c];
        j["worst_margin"][names[c]] = r.worst_margin[c];
    }
    j["class"] = r.cone_class;
    j["heuristic"] = r.heuristic;
    return j;
}

}  // namespace curvlab
