#pragma once

// Solver engines behind two contracts: linear programs (dense simplex with
// Farkas certificates) and log-objective problems with second-order-cone rows
// (primal log-barrier method).

#include "roekit/common.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace roekit::opt {

enum class Status { Optimal, Infeasible, Unbounded, Failure };

const char* to_string(Status s);

struct SolverOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iter = 200;
};

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

/// maximize c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
/// Infinite bounds are allowed; empty A_eq means no equality rows.
struct LpProblem {
    Vector c;
    Matrix A_ub;
    Vector b_ub;
    Matrix A_eq;
    Vector b_eq;
    Vector lower;
    Vector upper;

    /// Free variables, no rows.
    static LpProblem with_vars(Eigen::Index n);

    Eigen::Index num_vars() const { return c.size(); }
    void add_row(const Vector& a, double b);
    void add_eq(const Vector& a, double b);
    /// Number of scalar constraints (rows + equalities + finite bounds).
    Eigen::Index num_constraints() const;
};

/// Dual information of an LP. For an infeasible problem this is a Farkas
/// witness: y_ub >= 0, y_lo >= 0, y_up >= 0 with
///   A_ub'y_ub + A_eq'y_eq + y_up - y_lo = 0   and
///   b_ub'y_ub + b_eq'y_eq + upper'y_up - lower'y_lo < 0.
/// At an optimum it holds the KKT multipliers (A_ub'y_ub + A_eq'y_eq + y_up - y_lo = c).
struct LpDuals {
    Vector y_ub;
    Vector y_eq;
    Vector y_lo;
    Vector y_up;
};

struct LpResult {
    Status status = Status::Failure;
    double value = 0.0;
    Vector x;       ///< optimal point (Optimal), any feasible point (Unbounded)
    Vector ray;     ///< improving direction when Unbounded
    LpDuals duals;  ///< multipliers (Optimal) or Farkas witness (Infeasible)
    int iterations = 0;
    std::string diagnostics;
};

LpResult solve_lp(const LpProblem& p, const SolverOptions& opts = {});

/// Checks a Farkas witness returned for an infeasible problem. Returns the
/// violated-combination value b'y (negative when valid) or +inf when the
/// witness fails the sign/equality tests at tolerance `tol`.
double check_farkas(const LpProblem& p, const LpDuals& w, double tol = 1e-7);

// ---------------------------------------------------------------------------
// Log-objective cone programs
// ---------------------------------------------------------------------------

using SparseVec = Eigen::SparseVector<double>;

/// weight * log(a'z + b)
struct LogTerm {
    SparseVec a;
    double b = 0.0;
    double weight = 1.0;
};

/// a'z <= b
struct LinearRow {
    SparseVec a;
    double b = 0.0;
};

/// ||F z||_2 + h'z <= c, F given by its rows.
struct ConeRow {
    std::vector<SparseVec> F;
    SparseVec h;
    double c = 0.0;
};

/// maximize  sum_k w_k log(a_k'z + b_k) + lin'z  over the rows above.
struct LogConeProblem {
    Eigen::Index n = 0;
    std::vector<LogTerm> log_terms;
    Vector lin;  ///< may be empty (zero)
    std::vector<LinearRow> rows;
    std::vector<ConeRow> cones;

    explicit LogConeProblem(Eigen::Index num_vars = 0) : n(num_vars) {}
    void add_bounds(Eigen::Index var, double lo, double hi);
    double objective(const Vector& z) const;
    /// Largest constraint violation at z (<= 0 means feasible, < 0 strictly).
    double max_violation(const Vector& z) const;
};

struct LogConeResult {
    Status status = Status::Failure;
    double value = 0.0;
    Vector z;
    double gap = kInf;  ///< barrier duality-gap bound at termination
    int newton_steps = 0;
    std::string diagnostics;
};

/// Log-barrier interior-point method. `start`, when given and strictly
/// feasible, skips phase 1.
LogConeResult solve_logcone(const LogConeProblem& p, const SolverOptions& opts = {},
                            const Vector* start = nullptr);

SparseVec sparse_unit(Eigen::Index n, Eigen::Index i, double v = 1.0);
SparseVec to_sparse(const Vector& dense, double drop = 0.0);

}  // namespace roekit::opt
