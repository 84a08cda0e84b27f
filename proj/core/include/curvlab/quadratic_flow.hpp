#pragma once

#include "curvlab/curvature.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace curvlab {

/// Structure constants c(a,b,g) = <[w_a, w_b], w_g> of so(n) in the
/// lexicographic bivector basis, stored as the sparse matrices ad(w_a).
/// Immutable once built; one shared instance per dimension.
class StructureConstants {
public:
    struct Entry {
        int row;
        int col;
        double value;
    };

    static std::shared_ptr<const StructureConstants> for_dimension(int n);

    explicit StructureConstants(int n);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }

    /// Nonzero entries of the matrix of ad(w_a): (row g, col d) = c(a,d,g).
    const std::vector<Entry>& ad(int a) const { return ad_[a]; }

    double value(int a, int b, int g) const;

private:
    int n_;
    int dim_;
    std::vector<std::vector<Entry>> ad_;
};

/// R# with matrix entries 1/2 tr(ad(w_a)^T R ad(w_b) R). Its quadratic form
/// is <R# h, h> = -1/2 sum_i <[h, R([h, R w_i])], w_i>.
CurvatureOperator sharp(const CurvatureOperator& r);

/// Q(R) = R^2 + R#, the reaction term of the curvature evolution.
CurvatureOperator quadratic_term(const CurvatureOperator& r);

/// Symmetric bilinear map with quadratic_bilinear(R, R) = quadratic_term(R).
CurvatureOperator quadratic_bilinear(const CurvatureOperator& r1, const CurvatureOperator& r2);

/// <B(R1,R2), R3> in the Frobenius pairing; symmetric in all three slots.
double trilinear_form(const CurvatureOperator& r1, const CurvatureOperator& r2,
                      const CurvatureOperator& r3);

struct FlowConfig {
    double blowup_threshold = 1e12;
    double drift_threshold = 1e-8;
};

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<CurvatureOperator> states;
    double step_size = 0.0;
    std::string method = "rk4";
};

enum class OdeStatus { completed, blow_up, drift };

const char* to_string(OdeStatus s);

/// On blow_up or drift the trajectory ends at the last valid state.
struct OdeResult {
    OdeTrajectory trajectory;
    OdeStatus status = OdeStatus::completed;

    const CurvatureOperator& last_state() const { return trajectory.states.back(); }
    double last_time() const { return trajectory.times.back(); }
};

/// Fixed-step classical RK4 for d/dt R = Q(R). The last step is shortened so
/// the run ends exactly at t_end.
OdeResult ode_evolve(const CurvatureOperator& r0, double t_end, double step,
                     const FlowConfig& config = {});

/// Columns: t, |R|, tr R, |R_Id|, |R_0|, |R_W|, lambda_min(R), lambda_min(Ric).
void write_trajectory_csv(std::ostream& out, const OdeTrajectory& trajectory);

}  // namespace curvlab
