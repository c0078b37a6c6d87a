#pragma once

// Nonlinear unbalanced three-phase power flow (backward/forward sweep) and
// limit checking. This is the ground-truth evaluator for every linear result.

#include "roekit/netmodel.hpp"

#include <map>
#include <string>
#include <vector>

namespace roekit {

/// Customer powers in net.customers order (demand convention, kW / kVar).
struct Injection {
    std::vector<double> p_kw;
    std::vector<double> q_kvar;

    /// Passive customers at their fixed values, active customers at zero.
    static Injection passive_only(const NetworkModel& net);
    /// Like passive_only, then active customers set from the maps (missing ids stay 0).
    static Injection with_active(const NetworkModel& net, const std::map<std::string, double>& p_kw,
                                 const std::map<std::string, double>& q_kvar = {});
};

using PhaseVoltages = std::array<Complex, 3>;

struct PowerFlowSolution {
    std::vector<PhaseVoltages> v;       ///< per bus, p.u.; absent phases hold 0
    std::vector<PhaseVoltages> i_line;  ///< per line, p.u. (from -> to); absent phases hold 0
    bool converged = false;
    int iterations = 0;
    double residual = kInf;  ///< max |S_computed - S_specified| over bus-phases, p.u.
};

/// Voltages obtained by propagating v_ref through the tree with zero load.
std::vector<PhaseVoltages> no_load_voltages(const NetworkModel& net);

/// Backward/forward sweep. Returns converged = false (with the last residual)
/// instead of throwing when max_iter is exhausted.
PowerFlowSolution solve_power_flow(const NetworkModel& net, const Injection& inj, double tol = 1e-8,
                                   int max_iter = 100);

/// Complex power drawn by each bus-phase (p.u., demand convention).
std::vector<PhaseVoltages> bus_demand_pu(const NetworkModel& net, const Injection& inj);

struct Violation {
    enum class Kind { UnderVoltage, OverVoltage, OverCurrent };
    Kind kind;
    std::string element;  ///< bus id, or "from-to" for lines
    Phase phase;
    double value;  ///< |V| in p.u. or |I| in A
    double limit;
};

const char* to_string(Violation::Kind k);

struct ViolationReport {
    std::vector<Violation> items;
    bool ok() const { return items.empty(); }
};

ViolationReport check_limits(const PowerFlowSolution& sol, const NetworkModel& net, double v_margin = 0.0);

std::string solution_to_json(const NetworkModel& net, const PowerFlowSolution& sol);
PowerFlowSolution solution_from_json(const NetworkModel& net, const std::string& text);

struct BoundaryPoint {
    double p_sweep_kw = 0.0;
    bool feasible = false;
    double p_min_kw = 0.0;  ///< bound customer, valid when feasible
    double p_max_kw = 0.0;
};

/// Nonlinear FR boundary of two active customers: for n_points evenly spaced
/// values of the swept customer's P, the min/max feasible P of the other by
/// bisection on power flow + limits (tolerance tol_kw).
std::vector<BoundaryPoint> trace_fr_boundary(const NetworkModel& net, const std::string& sweep_customer,
                                             const std::string& bound_customer, int n_points,
                                             const std::map<std::string, double>& q_kvar = {},
                                             double tol_kw = 1e-3);

/// Feasibility probe used by the tracer: power flow converges and no limit is violated.
bool nonlinear_feasible(const NetworkModel& net, const Injection& inj, double v_margin = 0.0);

}  // namespace roekit
