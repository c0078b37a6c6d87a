#pragma once

// Geometry on feasible regions: inscribed ellipsoids and boxes, redundancy
// removal, containment certificates and small brute-force oracles.

#include "roekit/linfr.hpp"
#include "roekit/optbackend.hpp"
#include "roekit/polyhedron.hpp"

#include <optional>
#include <vector>

namespace roekit {

/// {diag(L) w + u : ||w|| <= 1}
struct Ellipsoid {
    Vector L;
    Vector u;

    Eigen::Index dim() const { return L.size(); }
    /// ||diag(L)^-1 (z - u)||
    double gauge(const Vector& z) const { return ((z - u).array() / L.array()).matrix().norm(); }
};

/// Per-customer status: +1 importing, -1 exporting, 0 free.
struct StatusConfig {
    std::vector<int> lambda;
    double eps_md = 1e3;
};

struct EllipsoidResult {
    Ellipsoid ellipsoid;
    Vector q;      ///< optimal reactive powers (kVar); empty when the FR has none
    Vector delta;  ///< status slacks (zero where no status applies)
    double objective = 0.0;
    int newton_steps = 0;
};

/// Maximum-volume diagonal ellipsoid inscribed in the parametric FR with q free
/// in its bounds (q_lo == q_hi fixes a coordinate). Statuses, when given, add
/// the penalised slack rows pulling the unused envelope side to zero.
/// Throws InfeasibleError when the FR has no interior, NumericalError on solver failure.
EllipsoidResult max_inscribed_ellipsoid(const ParametricFR& pfr, const StatusConfig* status = nullptr,
                                        const opt::SolverOptions& opts = {});
/// Same on a fixed polyhedron (no reactive coordinates).
EllipsoidResult max_inscribed_ellipsoid(const Polyhedron& fr, const StatusConfig* status = nullptr,
                                        const opt::SolverOptions& opts = {});

/// Largest box inside the ellipsoid: u +- L / sqrt(n).
Box ellipsoid_to_box(const Ellipsoid& e);

struct RedundancyResult {
    Polyhedron reduced;                 ///< normalized kept rows
    std::vector<Eigen::Index> kept;     ///< indices into the input
    std::vector<double> objective;      ///< O_i per input row (NaN when not solved)
    int lp_failures = 0;                ///< rows kept because their LP failed
};

/// Drops every row whose removal leaves the set unchanged (one LP per row,
/// fanned out over `threads` workers; 0 picks the hardware count).
RedundancyResult remove_redundant(const Polyhedron& P, unsigned threads = 0, const opt::SolverOptions& opts = {});

struct ContainmentRow {
    opt::Status status = opt::Status::Failure;
    double slack = 0.0;  ///< g_i + f'x_i (>= 0 when the row is certified)
};

struct ContainmentResult {
    bool contained = false;
    Matrix X;                     ///< multipliers, rows(P) x rows(R), all <= 0
    std::vector<ContainmentRow> rows;
    std::optional<Vector> counterexample;  ///< a point of P outside R
    Eigen::Index violated_row = -1;
    Eigen::Index scalar_constraints = 0;   ///< summed over the per-row systems
};

/// P = {x | E x <= f} subset of R = {x | G x <= g}? For every row i of R, solves
///   max f'x_i  s.t.  E' x_i = -G_i',  -f'x_i <= g_i,  x_i <= 0.
ContainmentResult mtt_contains(const Polyhedron& P, const Polyhedron& R, unsigned threads = 0,
                               double tol = 1e-9, const opt::SolverOptions& opts = {});

/// Algebraic replay of a certificate: E'X = -G', -f'X <= g (+tol), X <= tol.
bool verify_certificate(const Polyhedron& P, const Polyhedron& R, const Matrix& X, double tol = 1e-7);

/// Per-row multiplier system used by containment and expansion.
opt::LpProblem mtt_row_problem(const Polyhedron& P, const Polyhedron& R, Eigen::Index row, double tol);

/// Exact best box by enumerating every vertex pattern (dimension <= 12):
/// maximize sum log(hi - lo) with all 2^n vertices inside `fr` and
/// lo, hi within [p_lo, p_hi].
Box exact_dfr_small(const Polyhedron& fr, const Vector& p_lo, const Vector& p_hi,
                    const opt::SolverOptions& opts = {});

/// Vertices of a bounded polyhedron in dimension 2 or 3 (deduplicated at 1e-9).
/// Throws when the set is unbounded.
std::vector<Vector> enumerate_vertices(const Polyhedron& P, double tol = 1e-9);

/// Rows of P that are facets according to its vertex set (dimension 2 or 3);
/// among identical normalized rows only the first is reported.
std::vector<Eigen::Index> facet_rows(const Polyhedron& P, const std::vector<Vector>& vertices, double tol = 1e-7);

/// Vertices of a 2-D polygon in counterclockwise order.
std::vector<Vector> ccw_order(std::vector<Vector> pts);

}  // namespace roekit
