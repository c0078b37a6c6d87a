#include "roekit/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace roekit {

Box exact_dfr_small(const Polyhedron& fr, const Vector& p_lo, const Vector& p_hi, const opt::SolverOptions& opts) {
    fr.check();
    const Eigen::Index n = fr.dim();
    if (n > 12) throw Error("exact DFR enumeration supports at most 12 customers (got " + std::to_string(n) + ")");
    if (p_lo.size() != n || p_hi.size() != n) throw Error("exact DFR: bound vectors have the wrong length");

    // z = [lo (n) | hi (n)]
    opt::LogConeProblem prob(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        opt::SparseVec a(2 * n);
        a.insert(k) = -1.0;
        a.insert(n + k) = 1.0;
        prob.log_terms.push_back({a, 0.0, 1.0});
        prob.add_bounds(k, p_lo(k), p_hi(k));
        prob.add_bounds(n + k, p_lo(k), p_hi(k));
    }
    const std::uint64_t patterns = std::uint64_t{1} << n;
    for (Eigen::Index i = 0; i < fr.rows(); ++i) {
        std::uint64_t support = 0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (fr.G(i, k) != 0.0) support |= std::uint64_t{1} << k;
        if (support == 0) {
            if (fr.g(i) < 0.0) throw InfeasibleError("exact DFR: feasible region is empty");
            continue;
        }
        for (std::uint64_t s = 0; s < patterns; ++s) {
            if (s & ~support) continue;  // same constraint as the pattern with those bits cleared
            opt::SparseVec a(2 * n);
            for (Eigen::Index k = 0; k < n; ++k) {
                if (fr.G(i, k) == 0.0) continue;
                a.insert((s >> k) & 1u ? n + k : k) = fr.G(i, k);
            }
            prob.rows.push_back({a, fr.g(i)});
        }
    }
    const opt::LogConeResult res = opt::solve_logcone(prob, opts);
    if (res.status == opt::Status::Infeasible) throw InfeasibleError("exact DFR: " + res.diagnostics);
    if (res.status != opt::Status::Optimal) throw NumericalError("exact DFR: " + res.diagnostics);
    return {res.z.head(n), res.z.tail(n)};
}

namespace {

void require_bounded(const Polyhedron& P) {
    for (Eigen::Index k = 0; k < P.dim(); ++k)
        for (double sgn : {1.0, -1.0}) {
            opt::LpProblem lp = opt::LpProblem::with_vars(P.dim());
            lp.c = Vector::Zero(P.dim());
            lp.c(k) = sgn;
            lp.A_ub = P.G;
            lp.b_ub = P.g;
            const opt::LpResult r = opt::solve_lp(lp);
            if (r.status == opt::Status::Unbounded) throw Error("polyhedron is unbounded (ray found)");
            if (r.status == opt::Status::Infeasible) throw InfeasibleError("polyhedron is empty");
        }
}

void push_unique(std::vector<Vector>& out, const Vector& v, double tol) {
    for (const auto& w : out)
        if ((w - v).cwiseAbs().maxCoeff() <= tol) return;
    out.push_back(v);
}

}  // namespace

std::vector<Vector> enumerate_vertices(const Polyhedron& input, double tol) {
    input.check();
    const Eigen::Index n = input.dim();
    if (n != 2 && n != 3) throw Error("vertex enumeration supports dimension 2 or 3 only");
    const Polyhedron P = input.normalized();
    require_bounded(P);
    const Eigen::Index m = P.rows();
    const double member_tol = 1e-9 * (1.0 + P.g.cwiseAbs().maxCoeff());

    std::vector<Vector> out;
    auto try_rows = [&](const std::vector<Eigen::Index>& idx) {
        Matrix A(n, n);
        Vector b(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            A.row(r) = P.G.row(idx[static_cast<std::size_t>(r)]);
            b(r) = P.g(idx[static_cast<std::size_t>(r)]);
        }
        Eigen::FullPivLU<Matrix> lu(A);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        Vector v = lu.solve(b);
        if (v.allFinite() && P.contains(v, member_tol)) push_unique(out, v, tol);
    };
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            if (n == 2) {
                try_rows({i, j});
                continue;
            }
            for (Eigen::Index k = j + 1; k < m; ++k) try_rows({i, j, k});
        }
    return out;
}

std::vector<Eigen::Index> facet_rows(const Polyhedron& input, const std::vector<Vector>& vertices, double tol) {
    const Polyhedron P = input.normalized();
    const Eigen::Index n = P.dim();
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        if (P.G.row(i).norm() == 0.0) continue;
        bool dup = false;
        for (Eigen::Index j : out)
            if ((P.G.row(i) - P.G.row(j)).cwiseAbs().maxCoeff() <= 1e-9 && std::abs(P.g(i) - P.g(j)) <= 1e-9) dup = true;
        if (dup) continue;
        std::vector<Vector> on;
        for (const auto& v : vertices)
            if (std::abs(P.G.row(i).dot(v) - P.g(i)) <= tol) on.push_back(v);
        if (static_cast<Eigen::Index>(on.size()) < n) continue;
        Matrix D(n, static_cast<Eigen::Index>(on.size()) - 1);
        for (std::size_t k = 1; k < on.size(); ++k) D.col(static_cast<Eigen::Index>(k) - 1) = on[k] - on[0];
        Eigen::FullPivLU<Matrix> lu(D);
        lu.setThreshold(1e-9);
        if (lu.rank() >= n - 1) out.push_back(i);
    }
    return out;
}

std::vector<Vector> ccw_order(std::vector<Vector> pts) {
    if (pts.empty()) return pts;
    Vector c = Vector::Zero(2);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
        return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
    });
    return pts;
}

}  // namespace roekit
