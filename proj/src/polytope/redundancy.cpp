#include "roekit/polytope.hpp"

#include "roekit/log.hpp"
#include "roekit/parallel.hpp"

#include <cmath>
#include <limits>

namespace roekit {

namespace {

constexpr double kTieTol = 1e-8;
constexpr double kSameRowTol = 1e-9;

bool same_row(const Polyhedron& P, Eigen::Index i, Eigen::Index j) {
    return (P.G.row(i) - P.G.row(j)).cwiseAbs().maxCoeff() <= kSameRowTol && std::abs(P.g(i) - P.g(j)) <= kSameRowTol;
}

}  // namespace

RedundancyResult remove_redundant(const Polyhedron& input, unsigned threads, const opt::SolverOptions& opts) {
    input.check();
    const Polyhedron P = input.normalized();
    const Eigen::Index m = P.rows(), n = P.dim();

    // all-zero rows are either vacuous or make the set empty
    std::vector<Eigen::Index> live;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (P.G.row(i).norm() > 0.0) {
            live.push_back(i);
        } else if (P.g(i) < 0.0) {
            throw InfeasibleError("polyhedron is empty: row " + std::to_string(i) + " reads 0 <= " + std::to_string(P.g(i)));
        }
    }

    RedundancyResult out;
    out.objective.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
    std::vector<opt::Status> status(static_cast<std::size_t>(m), opt::Status::Failure);
    std::vector<std::string> diag(static_cast<std::size_t>(m));

    parallel_for(live.size(), threads, [&](std::size_t k) {
        const Eigen::Index i = live[k];
        opt::LpProblem lp = opt::LpProblem::with_vars(n);
        lp.c = P.G.row(i).transpose();
        lp.A_ub.resize(static_cast<Eigen::Index>(live.size()), n);
        lp.b_ub.resize(static_cast<Eigen::Index>(live.size()));
        for (std::size_t r = 0; r < live.size(); ++r) {
            lp.A_ub.row(static_cast<Eigen::Index>(r)) = P.G.row(live[r]);
            lp.b_ub(static_cast<Eigen::Index>(r)) = P.g(live[r]) + (live[r] == i ? 1.0 : 0.0);
        }
        const opt::LpResult res = opt::solve_lp(lp, opts);
        status[static_cast<std::size_t>(i)] = res.status;
        diag[static_cast<std::size_t>(i)] = res.diagnostics;
        if (res.status == opt::Status::Optimal) out.objective[static_cast<std::size_t>(i)] = res.value - P.g(i);
    });

    for (Eigen::Index i : live) {
        const auto si = static_cast<std::size_t>(i);
        if (status[si] == opt::Status::Infeasible)
            throw InfeasibleError("polyhedron is empty (redundancy LP for row " + std::to_string(i) + " is infeasible)");
        if (status[si] != opt::Status::Optimal) {
            ++out.lp_failures;
            log().warn("redundancy LP for row {} failed ({}); row kept", i, diag[si]);
            out.kept.push_back(i);
            continue;
        }
        const double o = out.objective[si];
        if (o > kTieTol) {
            out.kept.push_back(i);
        } else if (o >= -kTieTol) {
            // weakly active: drop only when an identical row is already kept
            bool twin = false;
            for (Eigen::Index j : out.kept)
                if (same_row(P, i, j)) twin = true;
            if (!twin) out.kept.push_back(i);
        }
    }
    out.reduced = P.select(out.kept);
    log().info("redundancy removal: {} -> {} rows", m, out.kept.size());
    return out;
}

}  // namespace roekit
