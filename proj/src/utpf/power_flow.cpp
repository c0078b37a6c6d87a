#include "roekit/utpf.hpp"

#include "common/json_util.hpp"

#include <cmath>

namespace roekit {

using namespace jsonu;

Injection Injection::passive_only(const NetworkModel& net) {
    Injection inj;
    for (const auto& c : net.customers) {
        inj.p_kw.push_back(c.active() ? 0.0 : c.p_kw);
        inj.q_kvar.push_back(c.active() ? 0.0 : c.q_kvar);
    }
    return inj;
}

Injection Injection::with_active(const NetworkModel& net, const std::map<std::string, double>& p_kw,
                                 const std::map<std::string, double>& q_kvar) {
    Injection inj = passive_only(net);
    for (std::size_t i = 0; i < net.customers.size(); ++i) {
        const auto& c = net.customers[i];
        if (!c.active()) continue;
        if (auto it = p_kw.find(c.id); it != p_kw.end()) inj.p_kw[i] = it->second;
        if (auto it = q_kvar.find(c.id); it != q_kvar.end()) inj.q_kvar[i] = it->second;
    }
    return inj;
}

std::vector<PhaseVoltages> no_load_voltages(const NetworkModel& net) {
    std::vector<PhaseVoltages> v(net.buses.size());
    for (std::size_t b = 0; b < net.buses.size(); ++b)
        for (Phase ph : net.buses[b].phases.list()) {
            auto k = static_cast<std::size_t>(ph);
            v[b][k] = net.v_ref[k];
        }
    return v;
}

std::vector<PhaseVoltages> bus_demand_pu(const NetworkModel& net, const Injection& inj) {
    if (inj.p_kw.size() != net.customers.size() || inj.q_kvar.size() != net.customers.size())
        throw Error("injection size does not match the customer list");
    std::vector<PhaseVoltages> s(net.buses.size());
    for (std::size_t i = 0; i < net.customers.size(); ++i) {
        const auto& c = net.customers[i];
        s[net.bus_index(c.bus)][static_cast<std::size_t>(c.phase)] +=
            Complex(inj.p_kw[i], inj.q_kvar[i]) / net.s_base_kva;
    }
    return s;
}

PowerFlowSolution solve_power_flow(const NetworkModel& net, const Injection& inj, double tol, int max_iter) {
    if (!(tol > 0.0)) throw Error("power flow tolerance must be positive");
    const Topology topo = build_topology(net);
    const auto demand = bus_demand_pu(net, inj);
    const std::size_t nb = net.buses.size();
    const double zb = net.z_base_ohm();

    std::vector<Impedance3> z_pu(net.lines.size());
    for (std::size_t l = 0; l < net.lines.size(); ++l) z_pu[l] = net.lines[l].z_ohm / zb;

    PowerFlowSolution sol;
    sol.v = no_load_voltages(net);
    std::vector<PhaseVoltages> i_load(nb), i_branch(nb);

    for (int it = 1; it <= max_iter; ++it) {
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t k = 0; k < 3; ++k) {
                i_load[b][k] = 0.0;
                if (demand[b][k] == 0.0) continue;
                if (!(std::abs(sol.v[b][k]) > 1e-6))
                    throw NumericalError("power flow collapsed: zero voltage at bus '" + net.buses[b].id + "'");
                i_load[b][k] = std::conj(demand[b][k] / sol.v[b][k]);
            }
        // backward: current entering each bus from its parent
        for (auto o = topo.order.rbegin(); o != topo.order.rend(); ++o) {
            const std::size_t b = *o;
            i_branch[b] = i_load[b];
            for (std::size_t ch : topo.children[b])
                for (std::size_t k = 0; k < 3; ++k) i_branch[b][k] += i_branch[ch][k];
        }
        // forward: voltage drop along each line
        double residual = 0.0;
        for (std::size_t b : topo.order) {
            if (b == topo.root) continue;
            const auto& z = z_pu[topo.parent_line[b]];
            const auto phases = net.buses[b].phases.list();
            for (Phase ph : phases) {
                const auto k = static_cast<std::size_t>(ph);
                Complex drop = 0.0;
                for (Phase ps : phases) {
                    const auto m = static_cast<std::size_t>(ps);
                    drop += z(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) * i_branch[b][m];
                }
                sol.v[b][k] = sol.v[topo.parent[b]][k] - drop;
                if (!std::isfinite(sol.v[b][k].real()) || !std::isfinite(sol.v[b][k].imag()))
                    throw NumericalError("power flow diverged at bus '" + net.buses[b].id + "'");
                residual = std::max(residual, std::abs(sol.v[b][k] * std::conj(i_load[b][k]) - demand[b][k]));
            }
        }
        sol.iterations = it;
        sol.residual = residual;
        if (residual <= tol) {
            sol.converged = true;
            break;
        }
    }

    sol.i_line.assign(net.lines.size(), PhaseVoltages{});
    for (std::size_t b = 0; b < nb; ++b) {
        if (b == topo.root) continue;
        const std::size_t l = topo.parent_line[b];
        const double sign = net.lines[l].to_bus == net.buses[b].id ? 1.0 : -1.0;
        for (std::size_t k = 0; k < 3; ++k) sol.i_line[l][k] = sign * i_branch[b][k];
    }
    return sol;
}

const char* to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::UnderVoltage: return "under_voltage";
        case Violation::Kind::OverVoltage: return "over_voltage";
        case Violation::Kind::OverCurrent: return "over_current";
    }
    return "";
}

ViolationReport check_limits(const PowerFlowSolution& sol, const NetworkModel& net, double v_margin) {
    ViolationReport rep;
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
        const auto& bus = net.buses[b];
        for (Phase ph : bus.phases.list()) {
            const double mag = std::abs(sol.v[b][static_cast<std::size_t>(ph)]);
            if (mag < bus.v_min - v_margin)
                rep.items.push_back({Violation::Kind::UnderVoltage, bus.id, ph, mag, bus.v_min - v_margin});
            else if (mag > bus.v_max + v_margin)
                rep.items.push_back({Violation::Kind::OverVoltage, bus.id, ph, mag, bus.v_max + v_margin});
        }
    }
    const double ib = net.i_base_a();
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
        const auto& ln = net.lines[l];
        if (!ln.i_max_a) continue;
        for (std::size_t k = 0; k < 3; ++k) {
            const double amps = std::abs(sol.i_line[l][k]) * ib;
            if (amps > *ln.i_max_a)
                rep.items.push_back({Violation::Kind::OverCurrent, ln.from_bus + "-" + ln.to_bus,
                                     static_cast<Phase>(k), amps, *ln.i_max_a});
        }
    }
    return rep;
}

std::string solution_to_json(const NetworkModel& net, const PowerFlowSolution& sol) {
    json volts = json::object();
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
        json per = json::object();
        for (Phase ph : net.buses[b].phases.list())
            per[std::string(1, phase_char(ph))] = complex_json(sol.v[b][static_cast<std::size_t>(ph)]);
        volts[net.buses[b].id] = per;
    }
    json doc = {{"voltages_pu", volts},
                {"residual", sol.residual},
                {"iterations", sol.iterations},
                {"converged", sol.converged}};
    return doc.dump(2) + "\n";
}

PowerFlowSolution solution_from_json(const NetworkModel& net, const std::string& text) {
    const json doc = parse_text(text, "power-flow solution");
    PowerFlowSolution sol;
    sol.v.assign(net.buses.size(), PhaseVoltages{});
    const json& volts = field(doc, "voltages_pu", "");
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
        const std::string p = at("voltages_pu", net.buses[b].id);
        const json& per = field(volts, net.buses[b].id, "voltages_pu");
        for (Phase ph : net.buses[b].phases.list()) {
            const std::string key(1, phase_char(ph));
            sol.v[b][static_cast<std::size_t>(ph)] = complex(field(per, key, p), at(p, key));
        }
    }
    sol.residual = number(field(doc, "residual", ""), "residual");
    sol.iterations = static_cast<int>(number(field(doc, "iterations", ""), "iterations"));
    const json& conv = field(doc, "converged", "");
    if (!conv.is_boolean()) throw ParseError("converged", "expected a boolean");
    sol.converged = conv.get<bool>();
    return sol;
}

}  // namespace roekit
