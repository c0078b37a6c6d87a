#include "roekit/utpf.hpp"

namespace roekit {

bool nonlinear_feasible(const NetworkModel& net, const Injection& inj, double v_margin) {
    PowerFlowSolution sol;
    try {
        sol = solve_power_flow(net, inj);
    } catch (const NumericalError&) {
        return false;
    }
    return sol.converged && check_limits(sol, net, v_margin).ok();
}

std::vector<BoundaryPoint> trace_fr_boundary(const NetworkModel& net, const std::string& sweep_customer,
                                             const std::string& bound_customer, int n_points,
                                             const std::map<std::string, double>& q_kvar, double tol_kw) {
    if (n_points < 2) throw Error("boundary trace needs at least 2 points");
    if (sweep_customer == bound_customer) throw Error("boundary trace needs two distinct customers");
    const Customer* sc = nullptr;
    const Customer* bc = nullptr;
    for (const auto& c : net.customers) {
        if (c.id == sweep_customer) sc = &c;
        if (c.id == bound_customer) bc = &c;
    }
    if (!sc || !sc->active()) throw Error("'" + sweep_customer + "' is not an active customer");
    if (!bc || !bc->active()) throw Error("'" + bound_customer + "' is not an active customer");
    if (net.active_customers().size() != 2) throw Error("boundary trace requires exactly two active customers");

    auto feasible = [&](double ps, double pb) {
        return nonlinear_feasible(net, Injection::with_active(net, {{sweep_customer, ps}, {bound_customer, pb}}, q_kvar));
    };

    std::vector<BoundaryPoint> out;
    const double lo = bc->p_lo_kw, hi = bc->p_hi_kw;
    constexpr int kScan = 64;
    for (int i = 0; i < n_points; ++i) {
        BoundaryPoint bp;
        bp.p_sweep_kw = sc->p_lo_kw + (sc->p_hi_kw - sc->p_lo_kw) * i / (n_points - 1);
        // the feasible slice is an interval; locate any member first
        double seed = 0.0;
        for (int s = 0; s <= kScan && !bp.feasible; ++s) {
            double pb = lo + (hi - lo) * s / kScan;
            if (feasible(bp.p_sweep_kw, pb)) {
                bp.feasible = true;
                seed = pb;
            }
        }
        if (!bp.feasible) {
            out.push_back(bp);
            continue;
        }
        auto bisect = [&](double in, double edge) {
            if (feasible(bp.p_sweep_kw, edge)) return edge;
            double out_pt = edge;
            while (std::abs(out_pt - in) > tol_kw) {
                double mid = 0.5 * (in + out_pt);
                (feasible(bp.p_sweep_kw, mid) ? in : out_pt) = mid;
            }
            return in;
        };
        bp.p_max_kw = bisect(seed, hi);
        bp.p_min_kw = bisect(seed, lo);
        out.push_back(bp);
    }
    return out;
}

}  // namespace roekit
