#pragma once

// End-to-end envelope computation, the deterministic baseline, the fairness
// audit and the Monte Carlo validation protocol.

#include "roekit/expand.hpp"
#include "roekit/linfr.hpp"
#include "roekit/polytope.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace roekit {

struct RoeConfig {
    bool optimize_q = true;
    bool use_statuses = false;
    double eps_md = 1e3;
    double expand_tol = 1e-6;
    int expand_rounds = 50;
    int scenarios = 100;  ///< validation scenarios per k
    std::uint64_t seed = 1;
    double v_margin = 0.005;
    unsigned threads = 0;  ///< 0 = hardware count
    /// Overrides the statuses stored in the network (by customer id).
    std::map<std::string, CustomerStatus> statuses;

    void check() const;
};

struct CustomerEnvelope {
    std::string id;
    double export_kw = 0.0;  ///< signed lower bound
    double import_kw = 0.0;  ///< upper bound
    double q_kvar = 0.0;
    int status = 0;  ///< +1 importing, -1 exporting, 0 free
};

struct StageTimings {
    double linearize_ms = 0.0;
    double ellipsoid_ms = 0.0;
    double redundancy_ms = 0.0;
    double expansion_ms = 0.0;
    double certification_ms = 0.0;
    double total_ms = 0.0;
};

struct EnvelopeSet {
    std::string method = "roe";  ///< "roe" or "detmtd"
    std::vector<CustomerEnvelope> customers;
    // stage artifacts (present for method "roe")
    Ellipsoid ellipsoid;
    Vector status_delta;
    Box c_ep;
    Box c_epe;
    Vector q_star;
    Polyhedron fr;          ///< full FR at q*
    Polyhedron fr_reduced;  ///< after redundancy removal
    ExpansionResult expansion;
    ContainmentResult cert_full;  ///< C_epe inside the full FR
    bool cert_vertex_checked = false;
    StageTimings timings;

    Box box() const;
    std::vector<int> lambda() const;
    /// timings_ms is omitted unless requested so reruns are byte-identical.
    std::string to_json(bool with_timings = false) const;
    /// Reads the customer list (and method) back; stage artifacts are not restored.
    static EnvelopeSet from_json(const std::string& text);
};

/// Per-customer statuses (+1 / -1 / 0) in active-customer order.
std::vector<int> resolve_statuses(const NetworkModel& net, const RoeConfig& cfg);

EnvelopeSet compute_roe(const NetworkModel& net, const RoeConfig& cfg);

struct DetmtdResult {
    Vector p;  ///< allocated limits, kW
    Vector q;  ///< dispatched reactive powers, kVar
    EnvelopeSet envelopes;
};

/// Single LP: maximize sum lambda_i p_i over the linear FR with q free in its bounds.
DetmtdResult detmtd_baseline(const NetworkModel& net, const std::vector<int>& statuses);

struct FairnessReport {
    int samples = 0;
    int skipped = 0;  ///< zero-width coordinates left out of the sum
    double max_condition = -kInf;
};

/// Samples feasible perturbations (L', u') of an ellipsoid inscribed in `fr`
/// (status rows held at their slack when given) and returns the largest
/// sum (dp+ + dp-) / (p+ + p-) of the induced boxes.
FairnessReport fairness_audit(const Ellipsoid& e, const Polyhedron& fr, int n_perturb, std::uint64_t seed,
                              const std::vector<int>* lambda = nullptr, const Vector* delta = nullptr);
/// Step-1 box of an envelope set against the FR it was computed in.
FairnessReport fairness_audit(const EnvelopeSet& env, const Polyhedron& fr, int n_perturb, std::uint64_t seed);
/// Free box perturbations that keep the box inside `fr` (informational after expansion).
FairnessReport fairness_audit_box(const Box& b, const Polyhedron& fr, int n_perturb, std::uint64_t seed);

/// Exact box-in-polyhedron test through each row's worst vertex.
bool box_inside(const Box& b, const Polyhedron& fr, double tol = 1e-9);

struct KStats {
    int k = 0;
    int scenarios = 0;
    double min_v = kInf;
    double max_v = -kInf;
    int violations = 0;     ///< scenarios with at least one violation
    int nonconverged = 0;
};

struct ScenarioRecord {
    int k = 0;
    int index = 0;
    bool converged = true;
    bool violated = false;
    std::string worst_element;
    char worst_phase = 'a';
    double worst_v = 0.0;
    double min_v = kInf;   ///< over all bus-phases
    double max_v = -kInf;
};

struct ValidationReport {
    std::vector<KStats> per_k;
    std::vector<ScenarioRecord> scenarios;

    int total_violations() const;
    int total_nonconverged() const;
    std::string to_json() const;
    std::string to_csv() const;
};

ValidationReport monte_carlo_validate(const NetworkModel& net, const EnvelopeSet& env, const RoeConfig& cfg);

}  // namespace roekit
