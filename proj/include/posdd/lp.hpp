#pragma once

#include <limits>
#include <vector>

#include "posdd/types.hpp"

namespace posdd::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kOptTol = 1e-8;

/// Dense LP: minimize objective . x subject to
///   eq_lhs x == eq_rhs,  ineq_lhs x <= ineq_rhs,  lower <= x <= upper.
/// Empty constraint blocks are permitted (0-row matrices).
struct LpProblem {
    int n_vars = 0;
    Vector objective;  // all-zero for feasibility problems
    Matrix eq_lhs;
    Vector eq_rhs;
    Matrix ineq_lhs;
    Vector ineq_rhs;
    std::vector<double> lower;  // -kInf allowed
    std::vector<double> upper;  // +kInf allowed

    /// Problem with n free variables, zero objective and no constraints.
    static LpProblem make(int n);

    void add_eq_row(const Vector& a, double b);
    void add_ineq_row(const Vector& a, double b);  // a.x <= b
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;                    // present unless Infeasible
    double objective_value = 0;  // meaningful when Optimal
    int iterations = 0;
    // Dual multipliers of the original rows (eq then ineq), extracted from the
    // final basis; used by complementary-slackness checks.
    Vector dual_eq;
    Vector dual_ineq;
};

/// Two-phase revised simplex. Dantzig pricing with a Bland fallback after a
/// run of non-improving iterations; deterministic tie-breaking.
/// Throws numerical_error when the iteration cap is exceeded.
LpSolution solve(const LpProblem& p);

/// Phase-1 only: returns any feasible point (status Optimal) or Infeasible.
/// The objective is ignored.
LpSolution solve_feasibility(const LpProblem& p);

}  // namespace posdd::lp
