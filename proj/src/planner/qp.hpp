#pragma once

// Dense strictly convex QP by the Goldfarb-Idnani dual active-set method:
//   min 0.5 z'Hz + c'z  s.t.  G z <= h,  lb <= z <= ub.

#include <Eigen/Dense>

namespace ccplan {

struct QpProblem
{
    Eigen::MatrixXd H;
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::VectorXd lb;  ///< -inf for free
    Eigen::VectorXd ub;  ///< +inf for free
};

enum class QpStatus { Solved, Infeasible, IterationLimit, NumericalFailure };

struct QpOptions
{
    int max_iter = 0;  ///< active-set changes; 0 picks 10 * (n + constraints)
    double tol = 1e-10;  ///< relative primal feasibility
};

struct QpResult
{
    QpStatus status = QpStatus::NumericalFailure;
    Eigen::VectorXd z;
    Eigen::VectorXd lambda;  ///< multipliers of G z <= h
    int iterations = 0;
};

/// H must be symmetric positive definite.
QpResult solve_qp(const QpProblem& qp, const QpOptions& opts = {});

}  // namespace ccplan
