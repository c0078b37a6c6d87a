#include "roekit/netmodel.hpp"

#include "common/json_util.hpp"

namespace roekit {

using namespace jsonu;

namespace {

PhaseSet parse_phases(const json& j, const std::string& path) {
    PhaseSet ps;
    auto add = [&](char c, const std::string& p) {
        Phase ph;
        try {
            ph = phase_from_char(c);
        } catch (const ParseError& e) {
            throw ParseError(p, e.what());
        }
        if (ps.contains(ph)) throw ParseError(p, std::string("phase ") + c + " listed twice");
        ps.insert(ph);
    };
    if (j.is_string()) {
        for (char c : j.get<std::string>()) add(c, path);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::string s = string(j[i], at(path, i));
            if (s.size() != 1) throw ParseError(at(path, i), "expected a single phase letter");
            add(s[0], at(path, i));
        }
    } else {
        throw ParseError(path, "expected a phase string such as \"abc\"");
    }
    return ps;
}

std::string phases_string(PhaseSet ps) {
    std::string s;
    for (Phase p : ps.list()) s += phase_char(p);
    return s;
}

Phase parse_phase(const json& j, const std::string& path) {
    std::string s = string(j, path);
    if (s.size() != 1) throw ParseError(path, "expected one of a, b, c");
    try {
        return phase_from_char(s[0]);
    } catch (const ParseError& e) {
        throw ParseError(path, e.what());
    }
}

}  // namespace

NetworkModel parse_network(const std::string& text) {
    const json doc = parse_text(text, "network document");
    if (!doc.is_object()) throw ParseError("", "network document must be a JSON object");
    NetworkModel net;

    const json& buses = array(field(doc, "buses", ""), "buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string p = at("buses", i);
        Bus b;
        b.id = string(field(buses[i], "id", p), at(p, "id"));
        b.phases = parse_phases(field(buses[i], "phases", p), at(p, "phases"));
        if (auto* v = optional_field(buses[i], "vmin_pu")) b.v_min = number(*v, at(p, "vmin_pu"));
        if (auto* v = optional_field(buses[i], "vmax_pu")) b.v_max = number(*v, at(p, "vmax_pu"));
        net.buses.push_back(std::move(b));
    }

    const json& lines = array(field(doc, "lines", ""), "lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string p = at("lines", i);
        Line l;
        l.from_bus = string(field(lines[i], "from", p), at(p, "from"));
        l.to_bus = string(field(lines[i], "to", p), at(p, "to"));
        const std::string zp = at(p, "z_ohm");
        const json& z = array(field(lines[i], "z_ohm", p), zp);
        if (z.size() != 3) throw ParseError(zp, "expected a 3x3 matrix");
        for (int r = 0; r < 3; ++r) {
            const json& row = array(z[r], at(zp, r));
            if (row.size() != 3) throw ParseError(at(zp, r), "expected 3 entries");
            for (int c = 0; c < 3; ++c) l.z_ohm(r, c) = complex(row[c], at(at(zp, r), c));
        }
        if (auto* v = optional_field(lines[i], "imax_a")) l.i_max_a = number(*v, at(p, "imax_a"));
        net.lines.push_back(std::move(l));
    }

    if (auto* cs = optional_field(doc, "customers")) {
        array(*cs, "customers");
        for (std::size_t i = 0; i < cs->size(); ++i) {
            const json& j = (*cs)[i];
            const std::string p = at("customers", i);
            Customer c;
            c.id = string(field(j, "id", p), at(p, "id"));
            c.bus = string(field(j, "bus", p), at(p, "bus"));
            c.phase = parse_phase(field(j, "phase", p), at(p, "phase"));
            const std::string kind = string(field(j, "kind", p), at(p, "kind"));
            if (kind == "active") {
                c.kind = CustomerKind::Active;
                for (const char* k : {"p_kw", "q_kvar"})
                    if (optional_field(j, k)) throw ParseError(at(p, k), "active customers carry bounds, not fixed values");
                c.p_lo_kw = number(field(j, "plo_kw", p), at(p, "plo_kw"));
                c.p_hi_kw = number(field(j, "phi_kw", p), at(p, "phi_kw"));
                c.q_lo_kvar = number(field(j, "qlo_kvar", p), at(p, "qlo_kvar"));
                c.q_hi_kvar = number(field(j, "qhi_kvar", p), at(p, "qhi_kvar"));
                if (auto* s = optional_field(j, "status")) {
                    try {
                        c.status = status_from_string(string(*s, at(p, "status")));
                    } catch (const ParseError& e) {
                        if (!e.path().empty()) throw;
                        throw ParseError(at(p, "status"), e.what());
                    }
                }
            } else if (kind == "passive") {
                c.kind = CustomerKind::Passive;
                for (const char* k : {"plo_kw", "phi_kw", "qlo_kvar", "qhi_kvar", "status"})
                    if (optional_field(j, k)) throw ParseError(at(p, k), "passive customers carry fixed values only");
                c.p_kw = number(field(j, "p_kw", p), at(p, "p_kw"));
                if (auto* v = optional_field(j, "q_kvar")) c.q_kvar = number(*v, at(p, "q_kvar"));
            } else {
                throw ParseError(at(p, "kind"), "expected \"active\" or \"passive\"");
            }
            net.customers.push_back(std::move(c));
        }
    }

    const json& src = field(doc, "source", "");
    net.reference_bus = string(field(src, "bus", "source"), "source.bus");
    if (auto* v = optional_field(src, "v_ref_pu")) {
        array(*v, "source.v_ref_pu");
        if (v->size() != 3) throw ParseError("source.v_ref_pu", "expected 3 phase voltages");
        for (std::size_t k = 0; k < 3; ++k) net.v_ref[k] = complex((*v)[k], at("source.v_ref_pu", k));
    }
    if (auto* b = optional_field(doc, "base")) {
        if (auto* v = optional_field(*b, "s_kva")) net.s_base_kva = number(*v, "base.s_kva");
        if (auto* v = optional_field(*b, "v_volts")) net.v_base_v = number(*v, "base.v_volts");
    }
    for (std::size_t k = 0; k < 3; ++k)
        if (!(std::abs(net.v_ref[k]) > 0.0)) throw ParseError(at("source.v_ref_pu", k), "zero reference voltage");

    net.validate();
    return net;
}

std::string serialize_network(const NetworkModel& net) {
    json doc;
    json buses = json::array();
    for (const auto& b : net.buses)
        buses.push_back({{"id", b.id}, {"phases", phases_string(b.phases)}, {"vmin_pu", b.v_min}, {"vmax_pu", b.v_max}});
    doc["buses"] = buses;

    json lines = json::array();
    for (const auto& l : net.lines) {
        json z = json::array();
        for (int r = 0; r < 3; ++r) {
            json row = json::array();
            for (int c = 0; c < 3; ++c) row.push_back(complex_json(l.z_ohm(r, c)));
            z.push_back(row);
        }
        json jl = {{"from", l.from_bus}, {"to", l.to_bus}, {"z_ohm", z}};
        if (l.i_max_a) jl["imax_a"] = *l.i_max_a;
        lines.push_back(jl);
    }
    doc["lines"] = lines;

    json cs = json::array();
    for (const auto& c : net.customers) {
        json jc = {{"id", c.id}, {"bus", c.bus}, {"phase", std::string(1, phase_char(c.phase))}};
        if (c.active()) {
            jc["kind"] = "active";
            jc["plo_kw"] = c.p_lo_kw;
            jc["phi_kw"] = c.p_hi_kw;
            jc["qlo_kvar"] = c.q_lo_kvar;
            jc["qhi_kvar"] = c.q_hi_kvar;
            jc["status"] = to_string(c.status);
        } else {
            jc["kind"] = "passive";
            jc["p_kw"] = c.p_kw;
            jc["q_kvar"] = c.q_kvar;
        }
        cs.push_back(jc);
    }
    doc["customers"] = cs;

    json vref = json::array();
    for (const auto& v : net.v_ref) vref.push_back(complex_json(v));
    doc["source"] = {{"bus", net.reference_bus}, {"v_ref_pu", vref}};
    doc["base"] = {{"s_kva", net.s_base_kva}, {"v_volts", net.v_base_v}};
    return doc.dump(2) + "\n";
}

}  // namespace roekit
