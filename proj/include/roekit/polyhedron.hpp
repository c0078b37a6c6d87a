#pragma once

#include "roekit/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roekit {

/// {x | G x <= g}. Optional per-row tags record where a row came from.
struct Polyhedron {
    Matrix G;
    Vector g;
    std::vector<std::string> var_names;
    std::vector<std::string> tags;

    Polyhedron() = default;
    Polyhedron(Matrix G_, Vector g_) : G(std::move(G_)), g(std::move(g_)) {}

    Eigen::Index dim() const { return G.cols(); }
    Eigen::Index rows() const { return G.rows(); }

    /// g - G x (negative entries are violations).
    Vector slack(const Vector& x) const { return g - G * x; }
    bool contains(const Vector& x, double tol = 1e-9) const;

    /// Rows scaled to unit 2-norm. Rows below 1e-12 of the largest row norm
    /// become exact zero rows (their g is left unscaled).
    Polyhedron normalized() const;
    /// Subset of rows, tags follow.
    Polyhedron select(const std::vector<Eigen::Index>& keep) const;
    /// Rows of `other` appended below this one.
    Polyhedron stacked(const Polyhedron& other) const;

    /// Throws ParseError on shape or finiteness problems.
    void check() const;

    std::string to_json() const;
    static Polyhedron from_json(const std::string& text);
};

/// Axis-aligned box lo <= x <= hi (export limit lo <= 0, import limit hi >= 0
/// for envelopes, but any lo <= hi is allowed).
struct Box {
    Vector lo;
    Vector hi;

    Eigen::Index dim() const { return lo.size(); }
    Vector width() const { return hi - lo; }
    double volume() const;
    /// sum log(width), with zero widths skipped.
    double log_width_sum(double floor = 1e-9) const;
    bool contains(const Box& inner, double tol = 1e-9) const;
    /// Rows p <= hi, -p <= -lo interleaved per coordinate (import row first).
    Polyhedron as_polyhedron() const;
    /// Vertex with bit k of `pattern` selecting hi (1) or lo (0) for coordinate k.
    Vector vertex(std::uint64_t pattern) const;
};

}  // namespace roekit
