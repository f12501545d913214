#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lmival/relaxation/relaxation.hpp"

namespace lmival::sdp {

using relaxation::SDProblem;

enum class SolveStatus { optimal, dual_infeasible, primal_infeasible, max_iter, numerical_failure };

//! "optimal", "dual-infeasible", ...
char const* to_string(SolveStatus s) noexcept;

struct SolveOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iter = 200;
    double step_fraction = 0.98;
    //! Threshold of the normalized Farkas residual for infeasibility certificates.
    double certificate_tol = 1e-6;
    //! Rank tolerance when eliminating the equality constraints.
    double rank_tol = 1e-10;
    bool verbose = false;
    //! Re-solve in long double when the double pass stalls.
    bool extended_precision_retry = true;

    void validate() const;
};

struct IterationLog {
    int iter;
    double primal_objective;
    double dual_objective;
    double rel_gap;
    double primal_infeasibility;
    double dual_infeasibility;
    double mu;
    double sigma;
    double step_primal;
    double step_dual;

    friend bool operator==(IterationLog const&, IterationLog const&) = default;
};

/// Result of min c'y + c0 s.t. Ay = b, F_j(y) >= 0.
///
/// "Primal" refers to this moment problem and "dual" to its conic dual, so
/// dual_infeasible means the moment problem is unbounded below.
struct SDPSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd y;
    //! Dual matrix per block, in the (possibly reduced) block coordinates.
    std::vector<Eigen::MatrixXd> block_duals;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double rel_gap = 0.0;
    //! Max over blocks of the LMI residual, relative to 1 + ||F(y0)||.
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    //! ||Ay - b|| / (1 + ||b||).
    double equality_residual = 0.0;
    int iterations = 0;
    std::size_t eliminated_rows = 0;
    std::vector<IterationLog> history;
    //! Improving direction in y when status is dual_infeasible.
    Eigen::VectorXd ray;
    std::string message;
    bool extended_precision = false;
};

SDPSolution solve(SDProblem const& p, SolveOptions const& o = {});

}  // namespace lmival::sdp
