#include "roekit/expand.hpp"

#include "common/json_util.hpp"
#include "roekit/log.hpp"
#include "roekit/parallel.hpp"

#include <cmath>

namespace roekit {

namespace {

constexpr double kWidthFloor = 1e-9;
constexpr double kTightSlack = 1e-10;

Box grown(const Box& b, const Vector& delta) {
    Box out = b;
    for (Eigen::Index k = 0; k < b.dim(); ++k) {
        out.hi(k) += delta(2 * k);
        out.lo(k) -= delta(2 * k + 1);
    }
    return out;
}

// Multipliers for every FR row at the current box (step a).
Matrix row_multipliers(const Polyhedron& E, const Polyhedron& R, unsigned threads, const opt::SolverOptions& opts) {
    Matrix X(E.rows(), R.rows());
    std::vector<opt::LpResult> res(static_cast<std::size_t>(R.rows()));
    parallel_for(res.size(), threads, [&](std::size_t k) {
        res[k] = opt::solve_lp(mtt_row_problem(E, R, static_cast<Eigen::Index>(k), 1e-9), opts);
    });
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
        const auto& r = res[static_cast<std::size_t>(i)];
        if (r.status != opt::Status::Optimal)
            throw Error("expansion: no feasible multiplier for FR row " + std::to_string(i) + " (" +
                        opt::to_string(r.status) + ")");
        X.col(i) = r.x;
    }
    return X;
}

}  // namespace

double log_width_objective(const Box& b) { return b.log_width_sum(kWidthFloor); }

ExpansionResult expand_dfr(const ExpansionProblem& prob, double tol, int max_rounds, unsigned threads,
                           const opt::SolverOptions& opts) {
    const Eigen::Index n = prob.initial.dim();
    if (prob.fr.dim() != n) throw Error("expansion: box and FR dimensions differ");
    if (!prob.lambda.empty() && static_cast<Eigen::Index>(prob.lambda.size()) != n)
        throw Error("expansion: status vector has the wrong length");
    if (((prob.initial.hi - prob.initial.lo).array() < 0.0).any()) throw Error("expansion: initial box is empty");

    const Polyhedron R = prob.fr.normalized();
    const Polyhedron E0 = prob.initial.as_polyhedron();
    ExpansionResult out;
    out.initial = prob.initial;

    ContainmentResult c0 = mtt_contains(E0, R, threads, 1e-9, opts);
    if (!c0.contained) throw Error("expansion: initial box is not inside the feasible region");
    Matrix X = c0.X;

    // locked increments stay at zero
    std::vector<bool> locked(static_cast<std::size_t>(2 * n), false);
    for (Eigen::Index k = 0; k < n && !prob.lambda.empty(); ++k) {
        const int lam = prob.lambda[static_cast<std::size_t>(k)];
        if (lam < 0) locked[static_cast<std::size_t>(2 * k)] = true;
        if (lam > 0) locked[static_cast<std::size_t>(2 * k + 1)] = true;
    }

    Vector delta = Vector::Zero(2 * n);
    double best = log_width_objective(prob.initial);
    out.objective_trace.push_back(best);

    for (int round = 1; round <= max_rounds; ++round) {
        // step b: increments at fixed multipliers
        Vector slack(R.rows());
        for (Eigen::Index i = 0; i < R.rows(); ++i) slack(i) = R.g(i) + E0.g.dot(X.col(i));
        std::vector<bool> fixed = locked;
        for (Eigen::Index i = 0; i < R.rows(); ++i) {
            if (slack(i) > kTightSlack) continue;
            for (Eigen::Index j = 0; j < 2 * n; ++j)
                if (-X(j, i) > 1e-14) fixed[static_cast<std::size_t>(j)] = true;
        }
        std::vector<Eigen::Index> var_of(static_cast<std::size_t>(2 * n), -1);
        Eigen::Index nv = 0;
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            if (!fixed[static_cast<std::size_t>(j)]) var_of[static_cast<std::size_t>(j)] = nv++;
        if (nv == 0) break;

        opt::LogConeProblem lp(nv);
        const Vector w0 = prob.initial.hi - prob.initial.lo;
        for (Eigen::Index k = 0; k < n; ++k) {
            opt::SparseVec a(nv);
            for (Eigen::Index j : {2 * k, 2 * k + 1})
                if (var_of[static_cast<std::size_t>(j)] >= 0) a.insert(var_of[static_cast<std::size_t>(j)]) = 1.0;
            if (a.nonZeros() == 0 && w0(k) <= kWidthFloor) continue;
            lp.log_terms.push_back({a, std::max(w0(k), kWidthFloor), 1.0});
        }
        for (Eigen::Index i = 0; i < R.rows(); ++i) {
            opt::SparseVec a(nv);
            for (Eigen::Index j = 0; j < 2 * n; ++j) {
                const Eigen::Index v = var_of[static_cast<std::size_t>(j)];
                if (v >= 0 && -X(j, i) > 1e-14) a.insert(v) = -X(j, i);
            }
            if (a.nonZeros()) lp.rows.push_back({a, slack(i)});
        }
        for (Eigen::Index v = 0; v < nv; ++v) lp.rows.push_back({opt::sparse_unit(nv, v, -1.0), 0.0});

        Vector start(nv);
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            if (var_of[static_cast<std::size_t>(j)] >= 0) start(var_of[static_cast<std::size_t>(j)]) = delta(j);
        const opt::LogConeResult res = opt::solve_logcone(lp, opts, &start);
        if (res.status == opt::Status::Unbounded)
            throw Error("expansion: the feasible region does not bound some envelope direction");
        if (res.status != opt::Status::Optimal) {
            log().warn("expansion round {}: increment step failed ({}); keeping previous box", round, res.diagnostics);
            break;
        }
        Vector cand = Vector::Zero(2 * n);
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            if (var_of[static_cast<std::size_t>(j)] >= 0) cand(j) = std::max(0.0, res.z(var_of[static_cast<std::size_t>(j)]));
        const double obj = log_width_objective(grown(prob.initial, cand));
        out.iterations = round;
        if (obj < best) {
            out.objective_trace.push_back(best);
            break;
        }
        const double gain = obj - best;
        delta = cand;
        best = obj;
        out.objective_trace.push_back(best);

        // step a: multipliers at the new box
        Polyhedron Enew = E0;
        Enew.g = E0.g + delta;
        X = row_multipliers(Enew, R, threads, opts);
        if (gain < tol) break;
    }

    out.delta_f = delta;
    out.expanded = grown(prob.initial, delta);
    out.certificate = mtt_contains(out.expanded.as_polyhedron(), prob.fr, threads, 1e-9, opts);
    log().info("expansion: {} rounds, log-width {:.6f} -> {:.6f}", out.iterations, out.objective_trace.front(), best);
    return out;
}

bool verify_expansion(const ExpansionResult& res, const Polyhedron& fr, std::optional<Vector>* counterexample,
                      unsigned threads) {
    if (res.delta_f.size() != 2 * res.initial.dim() || (res.delta_f.array() < 0.0).any()) return false;
    // the box is rebuilt from the increments so the replay checks the data it certifies
    const Box b = grown(res.initial, res.delta_f);
    if ((b.lo - res.expanded.lo).cwiseAbs().maxCoeff() > 1e-9 || (b.hi - res.expanded.hi).cwiseAbs().maxCoeff() > 1e-9)
        return false;
    const ContainmentResult c = mtt_contains(b.as_polyhedron(), fr, threads);
    if (counterexample) *counterexample = c.counterexample;
    return c.contained;
}

std::string ExpansionResult::to_json() const {
    using namespace jsonu;
    auto box = [](const Box& b) { return json{{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}}; };
    json doc = {{"initial", box(initial)},
                {"expanded", box(expanded)},
                {"delta_f", vector_json(delta_f)},
                {"iterations", iterations},
                {"objective_trace", objective_trace},
                {"certificate", {{"contained", certificate.contained}, {"X", matrix_json(certificate.X)}}}};
    return doc.dump(2) + "\n";
}

}  // namespace roekit
