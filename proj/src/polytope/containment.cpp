#include "roekit/polytope.hpp"

#include "roekit/log.hpp"
#include "roekit/parallel.hpp"

#include <cmath>

namespace roekit {

opt::LpProblem mtt_row_problem(const Polyhedron& P, const Polyhedron& R, Eigen::Index row, double tol) {
    const Eigen::Index m = P.rows();
    opt::LpProblem lp = opt::LpProblem::with_vars(m);
    lp.c = P.g;
    lp.A_eq = P.G.transpose();
    lp.b_eq = -R.G.row(row).transpose();
    lp.A_ub = -P.g.transpose();
    lp.b_ub = Vector::Constant(1, R.g(row) + tol * (1.0 + std::abs(R.g(row))));
    lp.upper = Vector::Zero(m);
    return lp;
}

namespace {

// A point of P violating row i of R, or nothing when none is found.
std::optional<Vector> find_violation(const Polyhedron& P, const Polyhedron& R, Eigen::Index i,
                                     const opt::LpResult& mtt, const opt::SolverOptions& opts) {
    const double tol = 1e-7;
    auto good = [&](const Vector& z) {
        return z.allFinite() && P.contains(z, tol * (1.0 + P.g.cwiseAbs().maxCoeff())) &&
               R.G.row(i).dot(z) > R.g(i) + 1e-12;
    };
    // Farkas witness: E y_eq = f y_ub - y_up, G_i y_eq > g_i y_ub
    if (mtt.status == opt::Status::Infeasible && mtt.duals.y_ub.size() == 1 && mtt.duals.y_ub(0) > 1e-12) {
        Vector z = mtt.duals.y_eq / mtt.duals.y_ub(0);
        if (good(z)) return z;
    }
    opt::LpProblem lp = opt::LpProblem::with_vars(P.dim());
    lp.c = R.G.row(i).transpose();
    lp.A_ub = P.G;
    lp.b_ub = P.g;
    const opt::LpResult best = opt::solve_lp(lp, opts);
    if (best.status == opt::Status::Optimal && good(best.x)) return best.x;
    if (best.status == opt::Status::Unbounded) {
        const double rate = R.G.row(i).dot(best.ray);
        if (rate > 0.0) {
            const double t = std::max(0.0, (R.g(i) - R.G.row(i).dot(best.x)) / rate) + 1.0;
            Vector z = best.x + t * best.ray;
            if (good(z)) return z;
        }
    }
    return std::nullopt;
}

}  // namespace

ContainmentResult mtt_contains(const Polyhedron& P, const Polyhedron& R_in, unsigned threads, double tol,
                               const opt::SolverOptions& opts) {
    if (P.rows() == 0) throw Error("containment: P has no rows");
    if (R_in.rows() > 0 && R_in.dim() != P.dim()) throw Error("containment: dimension mismatch");
    const Polyhedron R = R_in.normalized();
    const Eigen::Index u = R.rows(), m = P.rows(), n = P.dim();

    ContainmentResult out;
    out.X = Matrix::Zero(m, u);
    out.rows.resize(static_cast<std::size_t>(u));
    out.scalar_constraints = 0;
    std::vector<opt::LpResult> results(static_cast<std::size_t>(u));
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(u));
    parallel_for(static_cast<std::size_t>(u), threads, [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        const opt::LpProblem lp = mtt_row_problem(P, R, i, tol);
        counts[k] = lp.num_constraints();
        results[k] = opt::solve_lp(lp, opts);
    });

    out.contained = true;
    for (Eigen::Index i = 0; i < u; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const opt::LpResult& res = results[k];
        out.scalar_constraints += counts[k];
        out.rows[k].status = res.status;
        if (res.status == opt::Status::Optimal) {
            const double scale = R_in.G.row(i).norm();
            out.X.col(i) = res.x * (scale > 0.0 ? scale : 1.0);
            out.rows[k].slack = R.g(i) + P.g.dot(res.x);
            continue;
        }
        if (res.status == opt::Status::Unbounded)
            throw Error("containment: multiplier LP unbounded for row " + std::to_string(i) + " (P is empty)");
        if (res.status == opt::Status::Failure)
            throw NumericalError("containment: LP failure on row " + std::to_string(i) + ": " + res.diagnostics);
        out.rows[k].slack = -kInf;
        if (out.contained) {
            out.contained = false;
            out.violated_row = i;
            out.counterexample = find_violation(P, R, i, res, opts);
            if (!out.counterexample)
                log().warn("containment: row {} has no certificate but no violating point was found", i);
        }
    }
    (void)n;
    return out;
}

bool verify_certificate(const Polyhedron& P, const Polyhedron& R, const Matrix& X, double tol) {
    if (X.rows() != P.rows() || X.cols() != R.rows()) return false;
    if (X.size() && X.maxCoeff() > tol) return false;
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
        const double scale = 1.0 + R.G.row(i).cwiseAbs().maxCoeff() + X.col(i).cwiseAbs().maxCoeff();
        if ((P.G.transpose() * X.col(i) + R.G.row(i).transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
        if (-P.g.dot(X.col(i)) > R.g(i) + tol * (1.0 + std::abs(R.g(i)))) return false;
    }
    return true;
}

}  // namespace roekit
