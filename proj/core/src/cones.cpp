#include "curvlab/cones.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/model_spaces.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace curvlab {

namespace {

MarginEval exact_margin(double value) { return {value, Certification::exact, std::nullopt}; }

Vector eigenvalues_ascending(const Matrix& m) {
    if (m.rows() == 0) return Vector();
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

/// Directional derivative of the sum of the k smallest eigenvalues of `at`
/// along `along` (Ky Fan), resolving clusters at the k-th eigenvalue.
std::optional<double> ky_fan_slope(const Matrix& at, const Matrix& along, int k) {
    if (at.rows() < k) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Matrix> es(at);
    const Vector& ev = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    const double cluster_tol = 1e-7 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double lk = ev[k - 1];

    double slope = 0.0;
    int below = 0;
    std::vector<int> cluster;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] < lk - cluster_tol) {
            slope += u.col(i).dot(along * u.col(i));
            ++below;
        } else if (ev[i] <= lk + cluster_tol) {
            cluster.push_back(i);
        }
    }
    Matrix basis(at.rows(), static_cast<int>(cluster.size()));
    for (std::size_t c = 0; c < cluster.size(); ++c) basis.col(static_cast<int>(c)) = u.col(cluster[c]);
    const Vector restricted = eigenvalues_ascending(basis.transpose() * along * basis);
    for (int i = 0; i < k - below; ++i) slope += restricted[i];
    return slope;
}

void require_dim(const CurvatureOperator& r, int min_n, const char* what) {
    if (r.n() < min_n) {
        throw UnsupportedError(std::string(what) + ": requires n >= " + std::to_string(min_n));
    }
}

// Coefficient matrix C with c^T (x ^ y) = x^T C y.
Matrix pairing_matrix(const Vector& c, int n) {
    Matrix m(n, n);
    m.setZero();
    int p = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++p) {
            m(i, j) = c[p];
            m(j, i) = -c[p];
        }
    return m;
}

struct FrameValue {
    double value;
    Matrix gradient;
};

FrameValue isotropic_with_gradient(const Matrix& r, int n, const Matrix& f, bool want_gradient) {
    const Vector f0 = f.col(0), f1 = f.col(1), f2 = f.col(2), f3 = f.col(3);
    const Vector w02 = wedge(f0, f2).coords, w03 = wedge(f0, f3).coords;
    const Vector w12 = wedge(f1, f2).coords, w13 = wedge(f1, f3).coords;
    const Vector w01 = wedge(f0, f1).coords, w23 = wedge(f2, f3).coords;
    const Vector r02 = r * w02, r03 = r * w03, r12 = r * w12, r13 = r * w13;
    const Vector r01 = r * w01, r23 = r * w23;

    FrameValue out;
    out.value = w02.dot(r02) + w03.dot(r03) + w12.dot(r12) + w13.dot(r13) - 2.0 * w01.dot(r23);
    if (!want_gradient) return out;

    Matrix g = Matrix::Zero(n, 4);
    auto add_pair = [&](int a, int b, const Vector& coeff) {
        const Matrix c = pairing_matrix(coeff, n);
        g.col(a) += c * f.col(b);
        g.col(b) -= c * f.col(a);
    };
    add_pair(0, 2, 2.0 * r02);
    add_pair(0, 3, 2.0 * r03);
    add_pair(1, 2, 2.0 * r12);
    add_pair(1, 3, 2.0 * r13);
    add_pair(0, 1, -2.0 * r23);
    add_pair(2, 3, -2.0 * r01);
    out.gradient = std::move(g);
    return out;
}

Matrix qr_retract(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

FrameMinimum descend(const Matrix& r, int n, Matrix f, double scale, const PicOptions& options) {
    FrameValue cur = isotropic_with_gradient(r, n, f, true);
    double alpha = 1.0 / std::max(1.0, scale);
    for (int it = 0; it < options.max_iterations; ++it) {
        const Matrix ftg = f.transpose() * cur.gradient;
        const Matrix rgrad = cur.gradient - f * (0.5 * (ftg + ftg.transpose()));
        const double gn2 = rgrad.squaredNorm();
        if (gn2 <= 1e-28 * std::max(1.0, scale * scale)) break;

        double step = alpha;
        bool accepted = false;
        Matrix next;
        double next_value = 0.0;
        for (int ls = 0; ls < 60; ++ls) {
            next = qr_retract(f - step * rgrad);
            next_value = isotropic_with_gradient(r, n, next, false).value;
            if (next_value <= cur.value - 1e-4 * step * gn2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const double decrease = cur.value - next_value;
        f = std::move(next);
        cur = isotropic_with_gradient(r, n, f, true);
        alpha = 2.0 * step;
        if (decrease < options.decrease_tol * std::max(1.0, scale)) break;
    }
    return {cur.value, std::move(f)};
}

MarginEval heuristic(FrameMinimum m) {
    return {m.value, Certification::heuristic, std::move(m.frame)};
}

}  // namespace

const char* to_string(Certification c) {
    return c == Certification::exact ? "exact" : "heuristic";
}

MarginEval ConeSpec::eval(const CurvatureOperator& r) const {
    if (r.n() != n) {
        throw std::invalid_argument("cone '" + name + "' is defined for n = " + std::to_string(n) +
                                    ", got n = " + std::to_string(r.n()));
    }
    return evaluate(r);
}

double margin_scal(const CurvatureOperator& r) {
    return r.dim() == 0 ? 0.0 : r.trace() / std::sqrt(static_cast<double>(r.dim()));
}

double margin_nn_operator(const CurvatureOperator& r) {
    return eigenvalues_ascending(r.mat())[0];
}

double margin_2nn(const CurvatureOperator& r) {
    if (r.dim() < 2) throw UnsupportedError("margin_2nn: needs at least two bivectors");
    const Vector ev = eigenvalues_ascending(r.mat());
    return ev[0] + ev[1];
}

double margin_nn_ricci(const CurvatureOperator& r) {
    return eigenvalues_ascending(ricci(r).mat)[0];
}

double isotropic_curvature(const CurvatureOperator& r, const Matrix& frame) {
    if (frame.rows() != r.n() || frame.cols() != 4) {
        throw std::invalid_argument("isotropic_curvature: frame must be n x 4");
    }
    return isotropic_with_gradient(r.mat(), r.n(), frame, false).value;
}

FrameMinimum margin_pic(const CurvatureOperator& r, const PicOptions& options) {
    require_dim(r, 4, "margin_pic");
    if (options.starts < 1) throw std::invalid_argument("margin_pic: starts must be >= 1");
    const int n = r.n();
    const double scale = r.norm();
    std::vector<FrameMinimum> results(options.starts);
    parallel_for(static_cast<std::size_t>(options.starts), [&](std::size_t s) {
        Matrix start;
        if (s == 0) {
            start = Matrix::Identity(n, 4);
        } else {
            Rng rng(options.seed, "pic-start", s);
            start = haar_orthogonal(n, rng).leftCols(4);
        }
        results[s] = descend(r.mat(), n, std::move(start), scale, options);
    });
    std::size_t best = 0;
    for (std::size_t s = 1; s < results.size(); ++s) {
        if (results[s].value < results[best].value) best = s;
    }
    return std::move(results[best]);
}

FrameMinimum margin_pic1(const CurvatureOperator& r, const PicOptions& options) {
    require_dim(r, 3, "margin_pic1");
    return margin_pic(product(r, CurvatureOperator::zero(1)), options);
}

FrameMinimum margin_pic2(const CurvatureOperator& r, const PicOptions& options) {
    require_dim(r, 3, "margin_pic2");
    return margin_pic(product(r, CurvatureOperator::zero(2)), options);
}

double margin_dim4_construction(const ConeSpec& base, const CurvatureOperator& r) {
    if (r.n() != 4 || base.n != 4) throw UnsupportedError("dim4 construction: requires n = 4");
    const Decomposition d = decompose(r);
    return base.margin(d.r_id + d.r_w);
}

ConeSpec make_dim4_cone(const ConeSpec& base) {
    if (base.n != 4) throw UnsupportedError("dim4 construction: base cone must live in n = 4");
    ConeSpec cone;
    cone.name = "dim4:" + base.name;
    cone.n = 4;
    cone.certification = base.certification;
    cone.evaluate = [base](const CurvatureOperator& r) {
        const Decomposition d = decompose(r);
        return base.eval(d.r_id + d.r_w);
    };
    if (base.first_order) {
        cone.first_order = [base](const CurvatureOperator& at, const CurvatureOperator& along) {
            const Decomposition da = decompose(at);
            const Decomposition dv = decompose(along);
            return base.first_order(da.r_id + da.r_w, dv.r_id + dv.r_w);
        };
    }
    return cone;
}

ConeSpec make_orbit_cone(int n, int orbit_size, std::uint64_t seed) {
    if (n < 3) throw UnsupportedError("orbit cone: requires n >= 3");
    if (orbit_size < 1) throw std::invalid_argument("orbit cone: orbit_size must be >= 1");
    Rng hrng(seed, "orbit-normal");
    const Decomposition d = decompose(random_operator(n, hrng));
    CurvatureOperator tilt = d.r_0 + d.r_w;
    tilt *= 1.0 / tilt.norm();
    CurvatureOperator normal = (1.0 / std::sqrt(static_cast<double>(bivector_dim(n)))) *
                               CurvatureOperator::identity(n);
    normal += 0.8 * tilt;

    auto normals = std::make_shared<std::vector<CurvatureOperator>>();
    for (int k = 0; k < orbit_size; ++k) {
        Rng grng(seed, "orbit-element", static_cast<std::uint64_t>(k));
        CurvatureOperator h = act(haar_orthogonal(n, grng), normal);
        h *= 1.0 / h.norm();
        normals->push_back(std::move(h));
    }

    ConeSpec cone;
    cone.name = "orbit";
    cone.n = n;
    cone.evaluate = [normals](const CurvatureOperator& r) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& h : *normals) m = std::min(m, h.inner(r));
        return exact_margin(m);
    };
    cone.first_order = [normals](const CurvatureOperator& at, const CurvatureOperator& along)
        -> std::optional<double> {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& h : *normals) m = std::min(m, h.inner(at));
        const double tol = 1e-9 * std::max(1.0, at.norm());
        double slope = std::numeric_limits<double>::infinity();
        for (const auto& h : *normals) {
            if (h.inner(at) <= m + tol) slope = std::min(slope, h.inner(along));
        }
        return slope;
    };
    return cone;
}

ConeSpec make_cone(std::string_view name, int n, const ConeOptions& options) {
    if (name.substr(0, 5) == "dim4:") {
        if (n != 4) throw UnsupportedError("dim4 construction: requires n = 4");
        return make_dim4_cone(make_cone(name.substr(5), 4, options));
    }
    if (n < 3) throw UnsupportedError("cones are supported for n >= 3");

    ConeSpec cone;
    cone.name = std::string(name);
    cone.n = n;
    if (name == "scal") {
        cone.evaluate = [](const CurvatureOperator& r) { return exact_margin(margin_scal(r)); };
        cone.first_order = [](const CurvatureOperator&, const CurvatureOperator& v)
            -> std::optional<double> { return margin_scal(v); };
    } else if (name == "nno") {
        cone.evaluate = [](const CurvatureOperator& r) { return exact_margin(margin_nn_operator(r)); };
        cone.first_order = [](const CurvatureOperator& at, const CurvatureOperator& v) {
            return ky_fan_slope(at.mat(), v.mat(), 1);
        };
    } else if (name == "2nn") {
        cone.evaluate = [](const CurvatureOperator& r) { return exact_margin(margin_2nn(r)); };
        cone.first_order = [](const CurvatureOperator& at, const CurvatureOperator& v) {
            return ky_fan_slope(at.mat(), v.mat(), 2);
        };
    } else if (name == "nnricci") {
        cone.evaluate = [](const CurvatureOperator& r) { return exact_margin(margin_nn_ricci(r)); };
        cone.first_order = [](const CurvatureOperator& at, const CurvatureOperator& v) {
            return ky_fan_slope(ricci(at).mat, ricci(v).mat, 1);
        };
    } else if (name == "pic" || name == "pic1" || name == "pic2") {
        if (name == "pic" && n < 4) throw UnsupportedError("pic: requires n >= 4");
        const int extra = name == "pic" ? 0 : (name == "pic1" ? 1 : 2);
        const PicOptions pic = options.pic;
        auto augment = [extra](const CurvatureOperator& r) {
            return extra == 0 ? r : product(r, CurvatureOperator::zero(extra));
        };
        cone.certification = Certification::heuristic;
        cone.evaluate = [augment, pic](const CurvatureOperator& r) {
            return heuristic(margin_pic(augment(r), pic));
        };
        cone.first_order = [augment, pic](const CurvatureOperator& at, const CurvatureOperator& v)
            -> std::optional<double> {
            const FrameMinimum m = margin_pic(augment(at), pic);
            return isotropic_curvature(augment(v), m.frame);
        };
    } else if (name == "orbit") {
        return make_orbit_cone(n, options.orbit_size, options.orbit_seed);
    } else {
        throw std::invalid_argument("unknown cone '" + std::string(name) + "'");
    }
    return cone;
}

const std::vector<std::string>& cone_names() {
    static const std::vector<std::string> names{"scal", "nno", "2nn", "pic", "pic1",
                                                "pic2", "nnricci", "dim4:<base>", "orbit"};
    return names;
}

BoundaryPoint boundary_point(const ConeSpec& cone, const CurvatureOperator& x,
                             const BoundaryOptions& options) {
    const CurvatureOperator id = CurvatureOperator::identity(cone.n);
    if (!(cone.margin(id) > 0.0)) {
        throw std::invalid_argument("boundary_point: identity is not inside cone '" + cone.name + "'");
    }
    const CurvatureOperator dir = x - id;
    auto at = [&](double t) { return id + t * dir; };

    double lo = 0.0;
    double hi = 1.0;
    for (;;) {
        const double probe = std::min(hi, options.cap);
        if (cone.margin(at(probe)) < 0.0) {
            hi = probe;
            break;
        }
        if (probe >= options.cap) return {true, probe, std::nullopt};
        lo = probe;
        hi *= 2.0;
    }

    CurvatureOperator inner = at(lo);
    double inner_margin = cone.margin(inner);
    for (int it = 0; it < 200; ++it) {
        if (inner_margin <= 1e-3 * options.tol * (1.0 + inner.norm())) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        const double mid = 0.5 * (lo + hi);
        CurvatureOperator r = at(mid);
        const double m = cone.margin(r);
        if (m >= 0.0) {
            lo = mid;
            inner = std::move(r);
            inner_margin = m;
        } else {
            hi = mid;
        }
    }
    return {false, lo, std::move(inner)};
}

TangentProbe tangent_probe(const ConeSpec& cone, const CurvatureOperator& rb,
                           const CurvatureOperator& v, const ProbeOptions& options) {
    const double rb_norm = rb.norm();
    const double base = cone.margin(rb);
    if (std::abs(base) > options.boundary_tol * (1.0 + rb_norm)) {
        throw std::invalid_argument("tangent_probe: point is not on the boundary (margin " +
                                    std::to_string(base) + ")");
    }
    TangentProbe probe;
    const double v_norm = v.norm();
    if (v_norm == 0.0) {
        probe.slope_margin = 0.0;
        probe.first_order_slope = 0.0;
        probe.accepted = true;
        return probe;
    }
    const double length = (rb_norm > 0.0 ? rb_norm : 1.0) / v_norm;
    probe.slope_margin = -std::numeric_limits<double>::infinity();
    for (double factor : options.h_factors) {
        const double h = factor * length;
        probe.slope_margin = std::max(probe.slope_margin, cone.margin(rb + h * v) / h);
    }
    if (cone.first_order) probe.first_order_slope = cone.first_order(rb, v);

    const double tol = options.slope_tol * v_norm;
    probe.accepted = probe.slope_margin >= -tol &&
                     (!probe.first_order_slope || *probe.first_order_slope >= -tol);
    return probe;
}

LinealityReport lineality_space(const ConeSpec& cone, int trials, std::uint64_t seed, double tol) {
    LinealityReport report;
    report.trials = trials;
    report.heuristic = cone.certification == Certification::heuristic;
    const int n = cone.n;
    const CurvatureOperator id = CurvatureOperator::identity(n);

    for (Component c : {Component::identity, Component::traceless_ricci, Component::weyl}) {
        const int k = static_cast<int>(c);
        if (c == Component::weyl && n < 4) {
            report.worst_margin[k] = 0.0;
            continue;  // the Weyl summand is {0}
        }
        double worst = std::numeric_limits<double>::infinity();
        for (int t = 0; t < trials; ++t) {
            CurvatureOperator g = id;
            if (c != Component::identity) {
                Rng rng(seed, std::string("lineality-") + to_string(c), static_cast<std::uint64_t>(t));
                g = random_operator(n, rng, c);
            }
            g *= 1.0 / g.norm();
            worst = std::min({worst, cone.margin(g), cone.margin(-g)});
        }
        report.worst_margin[k] = trials > 0 ? worst : 0.0;
        report.in_lineality[k] = trials > 0 && worst >= -tol;
    }
    if (report.in_lineality[0]) report.in_lineality = {true, true, true};

    const bool ric0 = report.flagged(Component::traceless_ricci);
    const bool weyl = report.flagged(Component::weyl);
    if (report.in_lineality[0]) {
        report.cone_class = "full space";
    } else if (ric0 && weyl) {
        report.cone_class = "C_scal";
    } else if (ric0) {
        report.cone_class = "contains S2_0^id";
    } else if (weyl) {
        report.cone_class = "contains W";
    } else {
        report.cone_class = "coercive";
    }
    return report;
}

CurvatureOperator haar_average(const CurvatureOperator& r, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("haar_average: samples must be >= 1");
    constexpr int chunk = 1024;
    const int chunks = (samples + chunk - 1) / chunk;
    const int N = r.dim();
    std::vector<Matrix> sums(chunks, Matrix::Zero(N, N));
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
        Matrix sum = Matrix::Zero(N, N);
        Matrix carry = Matrix::Zero(N, N);
        const int end = std::min(samples, static_cast<int>(c + 1) * chunk);
        for (int i = static_cast<int>(c) * chunk; i < end; ++i) {
            Rng rng(seed, "haar", static_cast<std::uint64_t>(i));
            const Matrix term = act(haar_orthogonal(r.n(), rng), r).mat();
            // Kahan summation per entry
            const Matrix y = term - carry;
            const Matrix t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        sums[c] = std::move(sum);
    });
    Matrix total = Matrix::Zero(N, N);
    Matrix carry = Matrix::Zero(N, N);
    for (const Matrix& s : sums) {
        const Matrix y = s - carry;
        const Matrix t = total + y;
        carry = (t - total) - y;
        total = t;
    }
    total /= samples;
    return CurvatureOperator::assume_valid(r.n(), 0.5 * (total + total.transpose()));
}

BoundednessProbe probe_trace_slice(const ConeSpec& cone, int rays, std::uint64_t seed, double cap) {
    BoundednessProbe probe;
    probe.rays = rays;
    const int n = cone.n;
    const int N = bivector_dim(n);
    const CurvatureOperator start = (1.0 / N) * CurvatureOperator::identity(n);
    for (int k = 0; k < rays; ++k) {
        Rng rng(seed, "trace-slice", static_cast<std::uint64_t>(k));
        CurvatureOperator dir = random_operator(n, rng);
        dir -= (dir.trace() / N) * CurvatureOperator::identity(n);
        dir *= 1.0 / dir.norm();
        // odd rays also lose trace; even rays stay on the slice tr = 1
        if (k % 2 == 1) dir -= (rng.uniform() / std::sqrt(static_cast<double>(N))) * CurvatureOperator::identity(n);
        double t = 1e-3;
        while (t <= cap && cone.margin(start + t * dir) >= 0.0) t *= 2.0;
        if (t > cap) {
            ++probe.unbounded;
        } else {
            probe.max_exit_parameter = std::max(probe.max_exit_parameter, t);
        }
    }
    return probe;
}

}  // namespace curvlab
