#pragma once

// Linear network model  A p + B q + C v = d,  E v <= f  and its reduction to a
// polyhedron over the active customers' active powers.

#include "roekit/polyhedron.hpp"
#include "roekit/utpf.hpp"

#include <string>
#include <utility>
#include <vector>

namespace roekit {

struct LinearModel {
    Matrix A, B, C;
    Vector d;
    Matrix E;
    Vector f;
    Vector p_lo, p_hi;  ///< kW
    Vector q_lo, q_hi;  ///< kVar
    std::vector<std::string> customer_ids;              ///< p and q coordinate order
    std::vector<std::pair<std::size_t, Phase>> v_index;  ///< bus-phase of v(2i) = Re, v(2i+1) = Im
    std::vector<std::string> row_tags;                  ///< one per row of E

    Eigen::Index n() const { return A.cols(); }
    /// v = C^-1 (d - A p - B q).
    Vector voltages(const Vector& p, const Vector& q) const;
};

/// Builds the linear model at `v_nominal` (no-load voltages when null).
/// Voltage magnitudes use the projection Re(V e^{-j theta_nom}); line currents
/// with a rating use an inscribed regular octagon.
LinearModel linearize(const NetworkModel& net, const std::vector<PhaseVoltages>* v_nominal = nullptr);

/// FR over p at a fixed q: rows of E (after eliminating v) followed by the box
/// rows p <= p_hi, -p <= -p_lo. Throws when q lies outside its bounds.
Polyhedron build_fr(const LinearModel& lm, const Vector& q);

/// Rows  M p + N q <= r  with  M = -E C^-1 A,  N = -E C^-1 B,  r = f - E C^-1 d.
/// Box bounds are kept separately.
struct ParametricFR {
    Matrix M, N;
    Vector r;
    Vector p_lo, p_hi, q_lo, q_hi;
    std::vector<std::string> customer_ids;
    std::vector<std::string> row_tags;

    Eigen::Index n() const { return M.cols(); }
    /// Same rows as build_fr(lm, q).
    Polyhedron at(const Vector& q) const;
};

ParametricFR parametric_fr(const LinearModel& lm);

}  // namespace roekit
