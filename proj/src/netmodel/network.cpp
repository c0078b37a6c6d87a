#include "roekit/netmodel.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>

namespace roekit {

std::vector<Phase> PhaseSet::list() const {
    std::vector<Phase> out;
    for (Phase p : {Phase::A, Phase::B, Phase::C})
        if (contains(p)) out.push_back(p);
    return out;
}

char phase_char(Phase p) { return "abc"[static_cast<int>(p)]; }

Phase phase_from_char(char c) {
    switch (c) {
        case 'a': case 'A': return Phase::A;
        case 'b': case 'B': return Phase::B;
        case 'c': case 'C': return Phase::C;
    }
    throw ParseError("", std::string("unknown phase '") + c + "'");
}

const char* to_string(CustomerStatus s) {
    switch (s) {
        case CustomerStatus::Free: return "free";
        case CustomerStatus::Importing: return "importing";
        case CustomerStatus::Exporting: return "exporting";
    }
    return "free";
}

CustomerStatus status_from_string(const std::string& s) {
    if (s == "free") return CustomerStatus::Free;
    if (s == "importing") return CustomerStatus::Importing;
    if (s == "exporting") return CustomerStatus::Exporting;
    throw ParseError("", "unknown status '" + s + "'");
}

std::size_t NetworkModel::bus_index(const std::string& id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return i;
    throw ParseError("", "unknown bus '" + id + "'");
}

std::vector<std::size_t> NetworkModel::active_customers() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < customers.size(); ++i)
        if (customers[i].active()) out.push_back(i);
    return out;
}

std::vector<std::string> NetworkModel::active_ids() const {
    std::vector<std::string> out;
    for (const auto& c : customers)
        if (c.active()) out.push_back(c.id);
    return out;
}

NetworkModel NetworkModel::scaled_impedance(double factor) const {
    NetworkModel out = *this;
    for (auto& l : out.lines) l.z_ohm *= factor;
    return out;
}

Topology build_topology(const NetworkModel& net) {
    const std::size_t nb = net.buses.size();
    std::unordered_map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < nb; ++i) idx[net.buses[i].id] = i;

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nb);  // (bus, line)
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
        const auto& ln = net.lines[l];
        const std::string path = "lines[" + std::to_string(l) + "]";
        auto f = idx.find(ln.from_bus);
        auto t = idx.find(ln.to_bus);
        if (f == idx.end()) throw ParseError(path + ".from", "dangling bus reference '" + ln.from_bus + "'");
        if (t == idx.end()) throw ParseError(path + ".to", "dangling bus reference '" + ln.to_bus + "'");
        if (f->second == t->second) throw ParseError(path, "self loop");
        adj[f->second].push_back({t->second, l});
        adj[t->second].push_back({f->second, l});
    }
    auto root = idx.find(net.reference_bus);
    if (root == idx.end()) throw ParseError("source.bus", "dangling bus reference '" + net.reference_bus + "'");

    Topology topo;
    topo.root = root->second;
    topo.parent.assign(nb, Topology::npos);
    topo.parent_line.assign(nb, Topology::npos);
    topo.children.assign(nb, {});
    std::vector<bool> used_line(net.lines.size(), false);
    std::queue<std::size_t> q;
    q.push(topo.root);
    topo.parent[topo.root] = topo.root;
    while (!q.empty()) {
        std::size_t b = q.front();
        q.pop();
        topo.order.push_back(b);
        for (auto [nbh, l] : adj[b]) {
            if (used_line[l]) continue;
            used_line[l] = true;
            if (topo.parent[nbh] != Topology::npos)
                throw ParseError("lines[" + std::to_string(l) + "]", "non-radial topology (cycle)");
            topo.parent[nbh] = b;
            topo.parent_line[nbh] = l;
            topo.children[b].push_back(nbh);
            q.push(nbh);
        }
    }
    for (std::size_t i = 0; i < nb; ++i)
        if (topo.parent[i] == Topology::npos)
            throw ParseError("buses[" + std::to_string(i) + "]", "bus '" + net.buses[i].id + "' is not connected to the source");
    return topo;
}

void NetworkModel::validate() const {
    if (buses.empty()) throw ParseError("buses", "no buses");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto& b = buses[i];
        const std::string path = "buses[" + std::to_string(i) + "]";
        if (b.id.empty()) throw ParseError(path + ".id", "empty id");
        if (!ids.insert(b.id).second) throw ParseError(path + ".id", "duplicate bus id '" + b.id + "'");
        if (b.phases.empty()) throw ParseError(path + ".phases", "no phases");
        if (!(b.v_min > 0.0 && b.v_min < b.v_max)) throw ParseError(path, "require 0 < vmin_pu < vmax_pu");
    }
    if (!(s_base_kva > 0.0)) throw ParseError("base.s_kva", "must be positive");
    if (!(v_base_v > 0.0)) throw ParseError("base.v_volts", "must be positive");

    for (std::size_t l = 0; l < lines.size(); ++l) {
        const auto& ln = lines[l];
        const std::string path = "lines[" + std::to_string(l) + "]";
        if (!ln.z_ohm.allFinite()) throw ParseError(path + ".z_ohm", "non-finite entry");
        if ((ln.z_ohm - ln.z_ohm.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + ln.z_ohm.cwiseAbs().maxCoeff()))
            throw ParseError(path + ".z_ohm", "impedance matrix is not symmetric");
        if (ln.i_max_a && !(*ln.i_max_a > 0.0)) throw ParseError(path + ".imax_a", "must be positive");
    }

    const Topology topo = build_topology(*this);
    const auto& root = buses[topo.root];
    if (!root.phases.subset_of(PhaseSet::all()) || root.phases.size() != 3)
        throw ParseError("source.bus", "reference bus must carry phases abc");
    for (std::size_t b = 0; b < buses.size(); ++b) {
        if (b == topo.root) continue;
        const std::size_t l = topo.parent_line[b];
        const std::string path = "lines[" + std::to_string(l) + "]";
        if (!buses[b].phases.subset_of(buses[topo.parent[b]].phases))
            throw ParseError(path, "phases of bus '" + buses[b].id + "' are not carried by its upstream bus");
        for (Phase ph : buses[b].phases.list()) {
            int k = static_cast<int>(ph);
            if (!(lines[l].z_ohm(k, k).real() > 0.0))
                throw ParseError(path + ".z_ohm", std::string("diagonal entry for phase ") + phase_char(ph) +
                                                      " needs positive resistance");
        }
    }

    std::set<std::string> cids;
    for (std::size_t i = 0; i < customers.size(); ++i) {
        const auto& c = customers[i];
        const std::string path = "customers[" + std::to_string(i) + "]";
        if (c.id.empty()) throw ParseError(path + ".id", "empty id");
        if (!cids.insert(c.id).second) throw ParseError(path + ".id", "duplicate customer id '" + c.id + "'");
        if (!ids.count(c.bus)) throw ParseError(path + ".bus", "dangling bus reference '" + c.bus + "'");
        if (c.bus == reference_bus) throw ParseError(path + ".bus", "customers cannot attach to the reference bus");
        if (!buses[bus_index(c.bus)].phases.contains(c.phase))
            throw ParseError(path + ".phase", std::string("phase ") + phase_char(c.phase) + " does not exist on bus '" +
                                                  c.bus + "'");
        if (c.active()) {
            if (!(c.p_lo_kw <= c.p_hi_kw)) throw ParseError(path, "require plo_kw <= phi_kw");
            if (!(c.q_lo_kvar <= c.q_hi_kvar)) throw ParseError(path, "require qlo_kvar <= qhi_kvar");
            if (c.p_kw != 0.0 || c.q_kvar != 0.0) throw ParseError(path, "active customers carry bounds, not fixed values");
        } else {
            if (c.p_lo_kw != 0.0 || c.p_hi_kw != 0.0 || c.q_lo_kvar != 0.0 || c.q_hi_kvar != 0.0 ||
                c.status != CustomerStatus::Free)
                throw ParseError(path, "passive customers carry fixed values only");
            if (!std::isfinite(c.p_kw) || !std::isfinite(c.q_kvar)) throw ParseError(path, "non-finite power");
        }
    }
}

}  // namespace roekit
