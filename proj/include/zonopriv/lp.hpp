#pragma once

#include <Eigen/Dense>

namespace zonopriv::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

/// Dense two-phase simplex for  min c'x  s.t.  A x = b, x >= 0.
/// Bland's rule guarantees termination. Intended for the small programs
/// that arise from zonotope containment (tens of rows and columns).
Result solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

} // namespace zonopriv::lp
