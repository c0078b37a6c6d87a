#pragma once

// Growing a certified box inside a fixed polyhedral FR by alternating between
// containment multipliers and a concave log-width program in the increments.

#include "roekit/polytope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace roekit {

struct ExpansionProblem {
    Box initial;
    Polyhedron fr;
    /// Per coordinate: -1 exporting (import side locked), +1 importing (export side locked), 0 free.
    std::vector<int> lambda;
};

struct ExpansionResult {
    Box initial;
    Box expanded;
    /// Increments in box-row order: (import, export) per coordinate.
    Vector delta_f;
    int iterations = 0;
    std::vector<double> objective_trace;
    ContainmentResult certificate;  ///< expanded box inside the FR it was grown in

    std::string to_json() const;
};

/// Throws Error when the initial box is not inside the FR or the FR does not
/// bound some free direction.
ExpansionResult expand_dfr(const ExpansionProblem& prob, double tol = 1e-6, int max_rounds = 50,
                           unsigned threads = 0, const opt::SolverOptions& opts = {});

/// True iff the expanded box is certified inside `fr` and contains the initial box.
bool verify_expansion(const ExpansionResult& res, const Polyhedron& fr,
                      std::optional<Vector>* counterexample = nullptr, unsigned threads = 0);

/// sum log(width) over coordinates whose width exceeds the 1e-9 floor.
double log_width_objective(const Box& b);

}  // namespace roekit
