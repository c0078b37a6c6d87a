#include "roekit/pipeline.hpp"

#include "common/json_util.hpp"

#include <sstream>

namespace roekit {

namespace {

using jsonu::json;

CustomerStatus status_of(int s) {
    return s > 0 ? CustomerStatus::Importing : s < 0 ? CustomerStatus::Exporting : CustomerStatus::Free;
}

json box_json(const Box& b) {
    if (b.lo.size() == 0) return nullptr;
    return {{"lo", jsonu::vector_json(b.lo)}, {"hi", jsonu::vector_json(b.hi)}};
}

}  // namespace

std::string EnvelopeSet::to_json(bool with_timings) const {
    json doc;
    doc["method"] = method;
    json cs = json::array();
    for (const auto& c : customers)
        cs.push_back({{"id", c.id},
                      {"export_kw", c.export_kw},
                      {"import_kw", c.import_kw},
                      {"q_kvar", c.q_kvar},
                      {"status", to_string(status_of(c.status))}});
    doc["customers"] = cs;

    json stages = json::object();
    if (q_star.size()) stages["q_star"] = jsonu::vector_json(q_star);
    if (method == "roe") {
        stages["ellipsoid"] = {{"L", jsonu::vector_json(ellipsoid.L)}, {"u", jsonu::vector_json(ellipsoid.u)}};
        if (status_delta.size()) stages["status_delta"] = jsonu::vector_json(status_delta);
        stages["c_ep"] = box_json(c_ep);
        stages["c_epe"] = box_json(c_epe);
        stages["fr_rows"] = fr.rows();
        stages["fr_reduced_rows"] = fr_reduced.rows();
        stages["fr_reduced_tags"] = fr_reduced.tags;
        stages["expansion"] = {{"iterations", expansion.iterations},
                               {"objective_trace", expansion.objective_trace},
                               {"delta_f", jsonu::vector_json(expansion.delta_f)}};
        doc["certificates"] = {{"full",
                                {{"contained", cert_full.contained},
                                 {"scalar_constraints", cert_full.scalar_constraints},
                                 {"vertex_checked", cert_vertex_checked}}},
                               {"expansion", {{"contained", expansion.certificate.contained}}}};
    }
    doc["stages"] = stages;
    if (with_timings)
        doc["timings_ms"] = {{"linearize", timings.linearize_ms},   {"ellipsoid", timings.ellipsoid_ms},
                             {"redundancy", timings.redundancy_ms}, {"expansion", timings.expansion_ms},
                             {"certification", timings.certification_ms}, {"total", timings.total_ms}};
    return doc.dump(2) + "\n";
}

EnvelopeSet EnvelopeSet::from_json(const std::string& text) {
    using namespace jsonu;
    const json doc = parse_text(text, "envelopes");
    EnvelopeSet env;
    if (const json* m = optional_field(doc, "method")) env.method = string(*m, "method");
    const json& cs = array(field(doc, "customers", ""), "customers");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string p = at("customers", i);
        CustomerEnvelope ce;
        ce.id = string(field(cs[i], "id", p), at(p, "id"));
        ce.export_kw = number(field(cs[i], "export_kw", p), at(p, "export_kw"));
        ce.import_kw = number(field(cs[i], "import_kw", p), at(p, "import_kw"));
        ce.q_kvar = number(field(cs[i], "q_kvar", p), at(p, "q_kvar"));
        if (const json* s = optional_field(cs[i], "status")) {
            const CustomerStatus st = status_from_string(string(*s, at(p, "status")));
            ce.status = st == CustomerStatus::Importing ? 1 : st == CustomerStatus::Exporting ? -1 : 0;
        }
        if (ce.export_kw > ce.import_kw) throw ParseError(p, "export limit exceeds import limit");
        env.customers.push_back(ce);
    }
    return env;
}

std::string ValidationReport::to_json() const {
    json doc;
    json ks = json::array();
    for (const auto& k : per_k)
        ks.push_back({{"k", k.k},
                      {"scenarios", k.scenarios},
                      {"min_v", k.min_v},
                      {"max_v", k.max_v},
                      {"violations", k.violations},
                      {"nonconverged", k.nonconverged}});
    doc["per_k"] = ks;
    json sc = json::array();
    for (const auto& s : scenarios) {
        json r = {{"k", s.k}, {"index", s.index}, {"converged", s.converged}};
        if (s.converged) {
            r["violated"] = s.violated;
            r["min_v"] = s.min_v;
            r["max_v"] = s.max_v;
            r["worst"] = {{"bus", s.worst_element}, {"phase", std::string(1, s.worst_phase)}, {"v_pu", s.worst_v}};
        }
        sc.push_back(r);
    }
    doc["scenarios"] = sc;
    doc["total_violations"] = total_violations();
    doc["total_nonconverged"] = total_nonconverged();
    return doc.dump(2) + "\n";
}

std::string ValidationReport::to_csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "k,min_v,max_v,violations\n";
    for (const auto& k : per_k) os << k.k << ',' << k.min_v << ',' << k.max_v << ',' << k.violations << '\n';
    return os.str();
}

}  // namespace roekit
