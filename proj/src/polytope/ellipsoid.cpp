#include "roekit/polytope.hpp"

#include "roekit/log.hpp"

#include <cmath>

namespace roekit {

using opt::SparseVec;

EllipsoidResult max_inscribed_ellipsoid(const ParametricFR& pfr, const StatusConfig* status,
                                        const opt::SolverOptions& opts) {
    const Eigen::Index n = pfr.n();
    const Eigen::Index nq_all = pfr.N.cols();
    if (n < 1) throw Error("ellipsoid: no active customers");
    if (status && static_cast<Eigen::Index>(status->lambda.size()) != n)
        throw Error("ellipsoid: status vector has the wrong length");
    if (status && !(status->eps_md > 0.0)) throw Error("ellipsoid: penalty must be positive");

    // split q into free coordinates and fixed ones (q_lo == q_hi)
    std::vector<Eigen::Index> free_q;
    Vector q_fixed = Vector::Zero(nq_all);
    for (Eigen::Index j = 0; j < nq_all; ++j) {
        if (pfr.q_hi(j) - pfr.q_lo(j) > 1e-12)
            free_q.push_back(j);
        else
            q_fixed(j) = pfr.q_lo(j);
    }
    const auto nf = static_cast<Eigen::Index>(free_q.size());
    std::vector<Eigen::Index> with_status;
    if (status)
        for (Eigen::Index j = 0; j < n; ++j)
            if (status->lambda[static_cast<std::size_t>(j)] != 0) with_status.push_back(j);
    const auto ns = static_cast<Eigen::Index>(with_status.size());

    // z = [L (n) | u (n) | q_free (nf) | delta (ns)]
    const Eigen::Index iL = 0, iu = n, iq = 2 * n, id = 2 * n + nf;
    const Eigen::Index nz = id + ns;
    opt::LogConeProblem prob(nz);
    for (Eigen::Index j = 0; j < n; ++j) prob.log_terms.push_back({opt::sparse_unit(nz, iL + j), 0.0, 1.0});

    const Vector rhs_all = pfr.r - pfr.N * q_fixed;
    for (Eigen::Index i = 0; i < pfr.M.rows(); ++i) {
        const auto a = pfr.M.row(i);
        SparseVec h(nz);
        double anorm = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (a(j) == 0.0) continue;
            h.insert(iu + j) = a(j);
            anorm = std::max(anorm, std::abs(a(j)));
        }
        for (Eigen::Index k = 0; k < nf; ++k) {
            double c = pfr.N(i, free_q[static_cast<std::size_t>(k)]);
            if (c != 0.0) h.insert(iq + k) = c;
        }
        if (anorm == 0.0) {
            if (h.nonZeros() == 0) {
                if (rhs_all(i) < -opts.feas_tol)
                    throw InfeasibleError("feasible region is empty (row " +
                                          (pfr.row_tags.empty() ? std::to_string(i) : pfr.row_tags[static_cast<std::size_t>(i)]) +
                                          " cannot be met)");
                continue;
            }
            prob.rows.push_back({h, rhs_all(i)});
            continue;
        }
        opt::ConeRow cone;
        for (Eigen::Index j = 0; j < n; ++j)
            if (a(j) != 0.0) cone.F.push_back(opt::sparse_unit(nz, iL + j, a(j)));
        cone.h = h;
        cone.c = rhs_all(i);
        prob.cones.push_back(std::move(cone));
    }
    // L_j + |u_j| within the customer's own bounds
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isfinite(pfr.p_hi(j))) {
            SparseVec a(nz);
            a.insert(iL + j) = 1.0;
            a.insert(iu + j) = 1.0;
            prob.rows.push_back({a, pfr.p_hi(j)});
        }
        if (std::isfinite(pfr.p_lo(j))) {
            SparseVec a(nz);
            a.insert(iL + j) = 1.0;
            a.insert(iu + j) = -1.0;
            prob.rows.push_back({a, -pfr.p_lo(j)});
        }
    }
    for (Eigen::Index k = 0; k < nf; ++k) {
        const Eigen::Index j = free_q[static_cast<std::size_t>(k)];
        prob.add_bounds(iq + k, pfr.q_lo(j), pfr.q_hi(j));
    }
    if (ns > 0) {
        prob.lin = Vector::Zero(nz);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
        for (Eigen::Index s = 0; s < ns; ++s) {
            const Eigen::Index j = with_status[static_cast<std::size_t>(s)];
            const double lam = status->lambda[static_cast<std::size_t>(j)] > 0 ? 1.0 : -1.0;
            SparseVec up(nz), dn(nz);
            up.insert(iL + j) = -lam * inv_sqrt_n;
            up.insert(iu + j) = 1.0;
            up.insert(id + s) = -1.0;
            dn.insert(iL + j) = lam * inv_sqrt_n;
            dn.insert(iu + j) = -1.0;
            dn.insert(id + s) = -1.0;
            prob.rows.push_back({up, 0.0});
            prob.rows.push_back({dn, 0.0});
            prob.rows.push_back({opt::sparse_unit(nz, id + s, -1.0), 0.0});
            prob.lin(id + s) = -status->eps_md;
        }
    }

    const opt::LogConeResult res = opt::solve_logcone(prob, opts);
    if (res.status == opt::Status::Infeasible)
        throw InfeasibleError("feasible region has no interior: " + res.diagnostics);
    if (res.status == opt::Status::Unbounded) throw Error("feasible region is unbounded; ellipsoid volume diverges");
    if (res.status != opt::Status::Optimal) throw NumericalError("ellipsoid solve failed: " + res.diagnostics);

    EllipsoidResult out;
    out.ellipsoid.L = res.z.segment(iL, n);
    out.ellipsoid.u = res.z.segment(iu, n);
    out.q = q_fixed;
    for (Eigen::Index k = 0; k < nf; ++k) out.q(free_q[static_cast<std::size_t>(k)]) = res.z(iq + k);
    out.delta = Vector::Zero(n);
    for (Eigen::Index s = 0; s < ns; ++s) out.delta(with_status[static_cast<std::size_t>(s)]) = res.z(id + s);
    out.objective = res.value;
    out.newton_steps = res.newton_steps;
    log().debug("ellipsoid: n={}, {} cones, {} rows, objective {:.6f}", n, prob.cones.size(), prob.rows.size(),
                out.objective);
    return out;
}

EllipsoidResult max_inscribed_ellipsoid(const Polyhedron& fr, const StatusConfig* status,
                                        const opt::SolverOptions& opts) {
    ParametricFR pfr;
    pfr.M = fr.G;
    pfr.N = Matrix::Zero(fr.rows(), 0);
    pfr.r = fr.g;
    pfr.p_lo = Vector::Constant(fr.dim(), -kInf);
    pfr.p_hi = Vector::Constant(fr.dim(), kInf);
    pfr.q_lo = pfr.q_hi = Vector(0);
    pfr.customer_ids = fr.var_names;
    pfr.row_tags = fr.tags;
    return max_inscribed_ellipsoid(pfr, status, opts);
}

Box ellipsoid_to_box(const Ellipsoid& e) {
    const double s = 1.0 / std::sqrt(static_cast<double>(e.dim()));
    return {e.u - s * e.L, e.u + s * e.L};
}

}  // namespace roekit
