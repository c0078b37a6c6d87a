#include "roekit/pipeline.hpp"

#include "roekit/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace roekit {

int ValidationReport::total_violations() const {
    int s = 0;
    for (const auto& k : per_k) s += k.violations;
    return s;
}

int ValidationReport::total_nonconverged() const {
    int s = 0;
    for (const auto& k : per_k) s += k.nonconverged;
    return s;
}

ValidationReport monte_carlo_validate(const NetworkModel& net, const EnvelopeSet& env, const RoeConfig& cfg) {
    cfg.check();
    const auto active = net.active_customers();
    const auto n = static_cast<int>(active.size());
    if (static_cast<int>(env.customers.size()) != n) throw Error("envelope set does not match the network's active customers");
    std::vector<std::size_t> env_of(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
        const auto& id = net.customers[active[a]].id;
        auto it = std::find_if(env.customers.begin(), env.customers.end(), [&](const CustomerEnvelope& c) { return c.id == id; });
        if (it == env.customers.end()) throw Error("no envelope for active customer '" + id + "'");
        env_of[a] = static_cast<std::size_t>(it - env.customers.begin());
    }

    const Injection base = Injection::passive_only(net);
    ValidationReport rep;
    const std::size_t per_k = static_cast<std::size_t>(cfg.scenarios);
    rep.scenarios.resize(static_cast<std::size_t>(n) * per_k);

    parallel_for(rep.scenarios.size(), cfg.threads, [&](std::size_t idx) {
        const int k = static_cast<int>(idx / per_k) + 1;
        const int s = static_cast<int>(idx % per_k);
        std::seed_seq sseq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s)};
        std::mt19937_64 rng(sseq);
        std::uniform_real_distribution<double> rf(0.0, 1.0);

        std::vector<std::size_t> pick(active.size());
        std::iota(pick.begin(), pick.end(), std::size_t{0});
        std::shuffle(pick.begin(), pick.end(), rng);

        Injection inj = base;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const auto& ce = env.customers[env_of[a]];
            inj.p_kw[active[a]] = 0.0;
            inj.q_kvar[active[a]] = ce.q_kvar;
        }
        for (int j = 0; j < k; ++j) {
            const std::size_t a = pick[static_cast<std::size_t>(j)];
            const auto& ce = env.customers[env_of[a]];
            const double r = rf(rng);
            int side = ce.status;
            if (side == 0) side = rf(rng) < 0.5 ? -1 : 1;
            inj.p_kw[active[a]] = r * (side > 0 ? ce.import_kw : ce.export_kw);
        }

        ScenarioRecord& rec = rep.scenarios[idx];
        rec.k = k;
        rec.index = s;
        PowerFlowSolution sol;
        try {
            sol = solve_power_flow(net, inj);
        } catch (const NumericalError&) {
            sol.converged = false;
        }
        if (!sol.converged) {
            rec.converged = false;
            return;
        }
        rec.violated = !check_limits(sol, net, cfg.v_margin).ok();
        double worst = -kInf;
        for (std::size_t b = 0; b < net.buses.size(); ++b)
            for (Phase ph : net.buses[b].phases.list()) {
                const double mag = std::abs(sol.v[b][static_cast<std::size_t>(ph)]);
                rec.min_v = std::min(rec.min_v, mag);
                rec.max_v = std::max(rec.max_v, mag);
                const double excess = std::max(net.buses[b].v_min - mag, mag - net.buses[b].v_max);
                if (excess > worst) {
                    worst = excess;
                    rec.worst_element = net.buses[b].id;
                    rec.worst_phase = phase_char(ph);
                    rec.worst_v = mag;
                }
            }
    });

    rep.per_k.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        KStats& st = rep.per_k[static_cast<std::size_t>(k - 1)];
        st.k = k;
        st.scenarios = cfg.scenarios;
    }
    for (const auto& rec : rep.scenarios) {
        KStats& st = rep.per_k[static_cast<std::size_t>(rec.k - 1)];
        if (!rec.converged) {
            ++st.nonconverged;
            continue;
        }
        if (rec.violated) ++st.violations;
        st.min_v = std::min(st.min_v, rec.min_v);
        st.max_v = std::max(st.max_v, rec.max_v);
    }
    return rep;
}

}  // namespace roekit
