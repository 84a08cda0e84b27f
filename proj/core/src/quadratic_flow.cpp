#include "curvlab/quadratic_flow.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace curvlab {

StructureConstants::StructureConstants(int n) : n_(n), dim_(bivector_dim(n)), ad_(dim_) {
    if (n < 2) throw std::invalid_argument("StructureConstants: n must be >= 2");
    const BivectorBasis basis(n);
    for (int a = 0; a < dim_; ++a) {
        auto [i, j] = basis.pair_of(a);
        const Bivector wa = Bivector::unit(n, i, j);
        for (int d = 0; d < dim_; ++d) {
            auto [k, l] = basis.pair_of(d);
            const Bivector br = bracket(wa, Bivector::unit(n, k, l));
            for (int g = 0; g < dim_; ++g) {
                if (br.coords[g] != 0.0) ad_[a].push_back({g, d, br.coords[g]});
            }
        }
    }
}

std::shared_ptr<const StructureConstants> StructureConstants::for_dimension(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const StructureConstants>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const StructureConstants>(n);
    cache.emplace(n, table);
    return table;
}

double StructureConstants::value(int a, int b, int g) const {
    for (const Entry& e : ad_[a]) {
        if (e.col == b && e.row == g) return e.value;
    }
    return 0.0;
}

CurvatureOperator sharp(const CurvatureOperator& r) {
    const int n = r.n();
    const int N = r.dim();
    if (n < 3) return CurvatureOperator::zero(n);  // so(2) is abelian
    const auto table = StructureConstants::for_dimension(n);
    const Matrix& R = r.mat();
    Matrix out(N, N);
    for (int a = 0; a < N; ++a) {
        for (int b = a; b < N; ++b) {
            double acc = 0.0;
            for (const auto& ea : table->ad(a)) {
                for (const auto& eb : table->ad(b)) {
                    acc += ea.value * eb.value * R(ea.row, eb.row) * R(eb.col, ea.col);
                }
            }
            out(a, b) = 0.5 * acc;
            out(b, a) = 0.5 * acc;
        }
    }
    return CurvatureOperator::assume_valid(n, std::move(out));
}

CurvatureOperator quadratic_term(const CurvatureOperator& r) {
    Matrix sq = r.mat() * r.mat();
    return CurvatureOperator::assume_valid(r.n(), 0.5 * (sq + sq.transpose())) + sharp(r);
}

CurvatureOperator quadratic_bilinear(const CurvatureOperator& r1, const CurvatureOperator& r2) {
    if (r1.n() != r2.n()) throw std::invalid_argument("quadratic_bilinear: dimension mismatch");
    return 0.5 * (quadratic_term(r1 + r2) - quadratic_term(r1) - quadratic_term(r2));
}

double trilinear_form(const CurvatureOperator& r1, const CurvatureOperator& r2,
                      const CurvatureOperator& r3) {
    if (r1.n() != r3.n()) throw std::invalid_argument("trilinear_form: dimension mismatch");
    return quadratic_bilinear(r1, r2).inner(r3);
}

const char* to_string(OdeStatus s) {
    switch (s) {
        case OdeStatus::completed: return "completed";
        case OdeStatus::blow_up: return "blow_up";
        case OdeStatus::drift: return "drift";
    }
    return "?";
}

OdeResult ode_evolve(const CurvatureOperator& r0, double t_end, double step,
                     const FlowConfig& config) {
    if (!(step > 0.0)) throw std::invalid_argument("ode_evolve: step must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("ode_evolve: t_end must be > 0");

    OdeResult result;
    result.trajectory.step_size = step;
    result.trajectory.times.push_back(0.0);
    result.trajectory.states.push_back(r0);

    const auto steps = static_cast<long>(std::ceil(t_end / step - 1e-9));
    CurvatureOperator state = r0;
    for (long k = 0; k < steps; ++k) {
        const double t = k * step;
        const double h = (k == steps - 1) ? t_end - t : step;
        const CurvatureOperator k1 = quadratic_term(state);
        const CurvatureOperator k2 = quadratic_term(state + (0.5 * h) * k1);
        const CurvatureOperator k3 = quadratic_term(state + (0.5 * h) * k2);
        const CurvatureOperator k4 = quadratic_term(state + h * k3);
        CurvatureOperator next = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double norm = next.norm();
        if (!std::isfinite(norm) || norm > config.blowup_threshold) {
            result.status = OdeStatus::blow_up;
            return result;
        }
        const double drift = std::max(bianchi_residual(next.n(), next.mat()),
                                      (next.mat() - next.mat().transpose()).norm()) /
                             std::max(1.0, norm);
        if (drift > config.drift_threshold) {
            result.status = OdeStatus::drift;
            return result;
        }
        state = std::move(next);
        result.trajectory.times.push_back(t + h);
        result.trajectory.states.push_back(state);
    }
    return result;
}

void write_trajectory_csv(std::ostream& out, const OdeTrajectory& trajectory) {
    out << "t,norm,trace,norm_id,norm_ric0,norm_weyl,lambda_min,lambda_min_ricci\n";
    const auto old_precision = out.precision(17);
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const CurvatureOperator& r = trajectory.states[k];
        double id = 0.0, r0 = 0.0, w = 0.0;
        if (r.n() >= 3) {
            const Decomposition d = decompose(r);
            id = d.r_id.norm();
            r0 = d.r_0.norm();
            w = d.r_w.norm();
        } else {
            id = r.norm();
        }
        const double lmin = r.dim() > 0 ? Eigen::SelfAdjointEigenSolver<Matrix>(r.mat(), Eigen::EigenvaluesOnly)
                                              .eigenvalues()
                                              .minCoeff()
                                        : 0.0;
        const double rmin = Eigen::SelfAdjointEigenSolver<Matrix>(ricci(r).mat, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .minCoeff();
        out << trajectory.times[k] << ',' << r.norm() << ',' << r.trace() << ',' << id << ',' << r0
            << ',' << w << ',' << lmin << ',' << rmin << '\n';
    }
    out.precision(old_precision);
}

}  // namespace curvlab
