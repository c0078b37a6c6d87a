#pragma once

#include "roekit/pipeline.hpp"
#include "roekit/utpf.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(ROEKIT_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline roekit::NetworkModel two_bus() { return roekit::parse_network(read_text(data_path("two_bus.json"))); }

inline roekit::Polyhedron example1() { return roekit::Polyhedron::from_json(read_text(data_path("example1.json"))); }

inline roekit::Polyhedron box_poly(const roekit::Vector& lo, const roekit::Vector& hi) {
    return roekit::Box{lo, hi}.as_polyhedron();
}

/// True when max/min of every coordinate over P is finite.
inline bool bounded(const roekit::Polyhedron& P) {
    namespace opt = roekit::opt;
    opt::LpProblem lp = opt::LpProblem::with_vars(P.dim());
    for (Eigen::Index i = 0; i < P.rows(); ++i) lp.add_row(P.G.row(i).transpose(), P.g(i));
    for (Eigen::Index k = 0; k < P.dim(); ++k)
        for (const double s : {1.0, -1.0}) {
            lp.c = roekit::Vector::Zero(P.dim());
            lp.c(k) = s;
            if (opt::solve_lp(lp).status != opt::Status::Optimal) return false;
        }
    return true;
}

/// Random polytope {x : a_i'x <= g_i} with unit normals spread over the sphere
/// and offsets in [0.5, 1.5], so the origin is interior. Regenerated until bounded.
inline roekit::Polyhedron random_polytope(int dim, int rows, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> off(0.5, 1.5);
    for (;;) {
        roekit::Polyhedron P(roekit::Matrix(rows, dim), roekit::Vector(rows));
        for (int i = 0; i < rows; ++i) {
            for (int k = 0; k < dim; ++k) P.G(i, k) = gauss(rng);
            P.G.row(i).normalize();
            P.g(i) = off(rng);
        }
        if (bounded(P)) return P;
    }
}

namespace detail {

inline double segment_distance(const roekit::Vector& p, const roekit::Vector& a, const roekit::Vector& b) {
    const roekit::Vector d = b - a;
    const double t = d.squaredNorm() > 0.0 ? std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0) : 0.0;
    return (a + t * d - p).norm();
}

// Largest distance from points along ring `a` to the closed ring `b`.
inline double directed_gap(const std::vector<roekit::Vector>& a, const std::vector<roekit::Vector>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (int s = 0; s < 50; ++s) {
            const roekit::Vector p = a[i] + (a[i + 1] - a[i]) * (s / 50.0);
            double best = roekit::kInf;
            for (std::size_t j = 0; j + 1 < b.size(); ++j) best = std::min(best, segment_distance(p, b[j], b[j + 1]));
            worst = std::max(worst, best);
        }
    return worst;
}

}  // namespace detail

/// Hausdorff distance (kW) between the linear FR polygon at q = 0 and the traced
/// nonlinear boundary of a network with two active customers.
inline double fr_hausdorff_gap(const roekit::NetworkModel& net, int points) {
    using roekit::Vector;
    const auto ids = net.active_ids();
    const roekit::Polyhedron fr = roekit::parametric_fr(roekit::linearize(net)).at(Vector::Zero(2));
    std::vector<Vector> lin = roekit::ccw_order(roekit::enumerate_vertices(fr));
    lin.push_back(lin.front());
    std::vector<Vector> lower, upper;
    for (const auto& bp : roekit::trace_fr_boundary(net, ids[0], ids[1], points))
        if (bp.feasible) {
            lower.push_back((Vector(2) << bp.p_sweep_kw, bp.p_min_kw).finished());
            upper.push_back((Vector(2) << bp.p_sweep_kw, bp.p_max_kw).finished());
        }
    std::vector<Vector> ring = lower;
    ring.insert(ring.end(), upper.rbegin(), upper.rend());
    ring.push_back(ring.front());
    return std::max(detail::directed_gap(ring, lin), detail::directed_gap(lin, ring));
}

/// Copy of the 2-bus network with every line impedance scaled.
inline roekit::NetworkModel scaled(const roekit::NetworkModel& net, double f) { return net.scaled_impedance(f); }

}  // namespace testing
