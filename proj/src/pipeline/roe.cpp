#include "roekit/pipeline.hpp"

#include "roekit/log.hpp"

#include <chrono>

namespace roekit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Locked envelope sides that came out within solver noise of zero are set to zero exactly.
Box snap_locked(const Box& b, const std::vector<int>& lambda, const Polyhedron& fr) {
    Box s = b;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (lambda[k] < 0 && std::abs(s.hi(i)) <= 1e-6) s.hi(i) = 0.0;
        if (lambda[k] > 0 && std::abs(s.lo(i)) <= 1e-6) s.lo(i) = 0.0;
    }
    return box_inside(s, fr) ? s : b;
}

}  // namespace

void RoeConfig::check() const {
    if (scenarios < 1) throw Error("scenario count must be at least 1");
    if (!(eps_md > 0.0)) throw Error("status penalty must be positive");
    if (!(expand_tol > 0.0)) throw Error("expansion tolerance must be positive");
    if (expand_rounds < 0) throw Error("expansion rounds must be non-negative");
    if (!(v_margin >= 0.0)) throw Error("voltage margin must be non-negative");
}

Box EnvelopeSet::box() const {
    const auto n = static_cast<Eigen::Index>(customers.size());
    Box b{Vector(n), Vector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        b.lo(k) = customers[static_cast<std::size_t>(k)].export_kw;
        b.hi(k) = customers[static_cast<std::size_t>(k)].import_kw;
    }
    return b;
}

std::vector<int> EnvelopeSet::lambda() const {
    std::vector<int> out;
    for (const auto& c : customers) out.push_back(c.status);
    return out;
}

std::vector<int> resolve_statuses(const NetworkModel& net, const RoeConfig& cfg) {
    for (const auto& [id, st] : cfg.statuses) {
        bool found = false;
        for (const auto& c : net.customers) found = found || (c.active() && c.id == id);
        if (!found) throw Error("status given for unknown active customer '" + id + "'");
    }
    std::vector<int> out;
    for (std::size_t i : net.active_customers()) {
        const auto& c = net.customers[i];
        CustomerStatus st = c.status;
        if (auto it = cfg.statuses.find(c.id); it != cfg.statuses.end()) st = it->second;
        out.push_back(st == CustomerStatus::Importing ? 1 : st == CustomerStatus::Exporting ? -1 : 0);
    }
    return out;
}

EnvelopeSet compute_roe(const NetworkModel& net, const RoeConfig& cfg) {
    cfg.check();
    if (net.active_customers().empty()) throw Error("network has no active customers");
    const auto t_start = Clock::now();
    EnvelopeSet env;

    auto t0 = Clock::now();
    const LinearModel lm = linearize(net);
    ParametricFR pfr = parametric_fr(lm);
    const Eigen::Index n = pfr.n();
    if (!cfg.optimize_q) {
        for (Eigen::Index j = 0; j < pfr.q_lo.size(); ++j) {
            const double q0 = std::clamp(0.0, pfr.q_lo(j), pfr.q_hi(j));
            pfr.q_lo(j) = pfr.q_hi(j) = q0;
        }
    }
    env.timings.linearize_ms = ms_since(t0);

    const std::vector<int> lambda = cfg.use_statuses ? resolve_statuses(net, cfg) : std::vector<int>(static_cast<std::size_t>(n), 0);
    StatusConfig sc{lambda, cfg.eps_md};

    // step 1: ellipsoid and its box
    t0 = Clock::now();
    const EllipsoidResult ell = max_inscribed_ellipsoid(pfr, cfg.use_statuses ? &sc : nullptr);
    env.ellipsoid = ell.ellipsoid;
    env.status_delta = ell.delta;
    env.q_star = ell.q;
    env.fr = pfr.at(env.q_star);
    env.c_ep = ellipsoid_to_box(ell.ellipsoid);
    if (cfg.use_statuses) env.c_ep = snap_locked(env.c_ep, lambda, env.fr);
    env.timings.ellipsoid_ms = ms_since(t0);

    // step 2: redundancy removal at q*
    t0 = Clock::now();
    const RedundancyResult red = remove_redundant(env.fr, cfg.threads);
    env.fr_reduced = red.reduced;
    env.timings.redundancy_ms = ms_since(t0);

    // step 3: expansion
    t0 = Clock::now();
    ExpansionProblem xp{env.c_ep, env.fr_reduced, cfg.use_statuses ? lambda : std::vector<int>{}};
    env.expansion = expand_dfr(xp, cfg.expand_tol, cfg.expand_rounds, cfg.threads);
    env.c_epe = env.expansion.expanded;
    env.timings.expansion_ms = ms_since(t0);

    // certification against the full FR
    t0 = Clock::now();
    env.cert_full = mtt_contains(env.c_epe.as_polyhedron(), env.fr, cfg.threads);
    if (!env.cert_full.contained) throw Error("certification failed: expanded box is not inside the full FR");
    if (n <= 12) {
        const double tol = 1e-8;
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s)
            if (env.fr.slack(env.c_epe.vertex(s)).minCoeff() < -tol)
                throw Error("certification disagreement: certificate accepted a box with a vertex outside the FR");
        env.cert_vertex_checked = true;
    }
    env.timings.certification_ms = ms_since(t0);

    for (Eigen::Index k = 0; k < n; ++k) {
        CustomerEnvelope ce;
        ce.id = pfr.customer_ids[static_cast<std::size_t>(k)];
        ce.export_kw = env.c_epe.lo(k);
        ce.import_kw = env.c_epe.hi(k);
        ce.q_kvar = env.q_star.size() ? env.q_star(k) : 0.0;
        ce.status = lambda[static_cast<std::size_t>(k)];
        env.customers.push_back(ce);
    }
    env.timings.total_ms = ms_since(t_start);
    log().info("envelopes: {} customers, FR {} -> {} rows, {:.1f} ms", n, env.fr.rows(), env.fr_reduced.rows(),
               env.timings.total_ms);
    return env;
}

}  // namespace roekit
