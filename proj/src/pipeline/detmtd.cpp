#include "roekit/pipeline.hpp"

namespace roekit {

DetmtdResult detmtd_baseline(const NetworkModel& net, const std::vector<int>& statuses) {
    const ParametricFR pfr = parametric_fr(linearize(net));
    const Eigen::Index n = pfr.n(), nq = pfr.N.cols();
    if (static_cast<Eigen::Index>(statuses.size()) != n) throw Error("DETmtd: one status per active customer is required");
    for (std::size_t k = 0; k < statuses.size(); ++k)
        if (statuses[k] != 1 && statuses[k] != -1)
            throw Error("DETmtd: customer '" + pfr.customer_ids[k] + "' needs an importing or exporting status");

    opt::LpProblem lp = opt::LpProblem::with_vars(n + nq);
    for (Eigen::Index k = 0; k < n; ++k) lp.c(k) = statuses[static_cast<std::size_t>(k)];
    lp.A_ub.resize(pfr.M.rows(), n + nq);
    lp.A_ub << pfr.M, pfr.N;
    lp.b_ub = pfr.r;
    lp.lower << pfr.p_lo, pfr.q_lo;
    lp.upper << pfr.p_hi, pfr.q_hi;
    const opt::LpResult res = opt::solve_lp(lp);
    if (res.status == opt::Status::Infeasible) throw InfeasibleError("DETmtd: the feasible region is empty");
    if (res.status != opt::Status::Optimal) throw NumericalError("DETmtd LP failed: " + res.diagnostics);

    DetmtdResult out;
    out.p = res.x.head(n);
    out.q = res.x.tail(nq);
    out.envelopes.method = "detmtd";
    out.envelopes.q_star = out.q;
    for (Eigen::Index k = 0; k < n; ++k) {
        CustomerEnvelope ce;
        ce.id = pfr.customer_ids[static_cast<std::size_t>(k)];
        ce.status = statuses[static_cast<std::size_t>(k)];
        (ce.status > 0 ? ce.import_kw : ce.export_kw) = out.p(k);
        ce.q_kvar = out.q(k);
        out.envelopes.customers.push_back(ce);
    }
    return out;
}

}  // namespace roekit
