#include "roekit/linfr.hpp"

#include <cmath>
#include <map>

namespace roekit {

namespace {

std::string bus_phase_tag(const NetworkModel& net, std::size_t b, Phase ph) {
    return net.buses[b].id + "." + phase_char(ph);
}

}  // namespace

Vector LinearModel::voltages(const Vector& p, const Vector& q) const {
    Vector rhs = d - A * p - B * q;
    return C.partialPivLu().solve(rhs);
}

LinearModel linearize(const NetworkModel& net, const std::vector<PhaseVoltages>* v_nominal) {
    const Topology topo = build_topology(net);
    const std::vector<PhaseVoltages> vn = v_nominal ? *v_nominal : no_load_voltages(net);
    if (vn.size() != net.buses.size()) throw Error("nominal voltage vector does not match the bus list");
    const double zb = net.z_base_ohm();

    LinearModel lm;
    std::map<std::pair<std::size_t, int>, Eigen::Index> vidx;
    for (std::size_t b : topo.order) {
        if (b == topo.root) continue;
        for (Phase ph : net.buses[b].phases.list()) {
            if (!(std::abs(vn[b][static_cast<std::size_t>(ph)]) > 0.0))
                throw Error("zero nominal voltage at " + bus_phase_tag(net, b, ph));
            vidx[{b, static_cast<int>(ph)}] = static_cast<Eigen::Index>(lm.v_index.size());
            lm.v_index.emplace_back(b, ph);
        }
    }
    const auto nv = static_cast<Eigen::Index>(2 * lm.v_index.size());

    const auto active = net.active_customers();
    const auto np = static_cast<Eigen::Index>(active.size());
    lm.A = Matrix::Zero(nv, np);
    lm.B = Matrix::Zero(nv, np);
    lm.C = Matrix::Zero(nv, nv);
    lm.d = Vector::Zero(nv);
    lm.p_lo.resize(np);
    lm.p_hi.resize(np);
    lm.q_lo.resize(np);
    lm.q_hi.resize(np);
    for (Eigen::Index j = 0; j < np; ++j) {
        const auto& c = net.customers[active[static_cast<std::size_t>(j)]];
        lm.customer_ids.push_back(c.id);
        lm.p_lo(j) = c.p_lo_kw;
        lm.p_hi(j) = c.p_hi_kw;
        lm.q_lo(j) = c.q_lo_kvar;
        lm.q_hi(j) = c.q_hi_kvar;
    }

    // V_b - V_parent + Z I_b = 0 per non-reference bus-phase
    for (const auto& [key, i] : vidx) {
        const auto [b, k] = key;
        lm.C(2 * i, 2 * i) = 1.0;
        lm.C(2 * i + 1, 2 * i + 1) = 1.0;
        const std::size_t par = topo.parent[b];
        if (par == topo.root) {
            lm.d(2 * i) += net.v_ref[static_cast<std::size_t>(k)].real();
            lm.d(2 * i + 1) += net.v_ref[static_cast<std::size_t>(k)].imag();
        } else {
            const Eigen::Index pi = vidx.at({par, k});
            lm.C(2 * i, 2 * pi) = -1.0;
            lm.C(2 * i + 1, 2 * pi + 1) = -1.0;
        }
    }

    // linearized customer currents I = (P - jQ) / (s_base conj(V_nom)), summed along the path to the root
    Eigen::Index active_col = 0;
    for (std::size_t ci = 0; ci < net.customers.size(); ++ci) {
        const auto& c = net.customers[ci];
        const std::size_t cb = net.bus_index(c.bus);
        const auto m = static_cast<int>(c.phase);
        const Complex w = 1.0 / (net.s_base_kva * std::conj(vn[cb][static_cast<std::size_t>(m)]));
        const Eigen::Index col = c.active() ? active_col++ : -1;
        for (std::size_t b = cb; b != topo.root; b = topo.parent[b]) {
            const Impedance3& z = net.lines[topo.parent_line[b]].z_ohm;
            for (Phase ph : net.buses[b].phases.list()) {
                const auto k = static_cast<int>(ph);
                const Eigen::Index i = vidx.at({b, k});
                const Complex zkm = z(k, m) / zb;
                if (col >= 0) {
                    const Complex alpha = zkm * w;
                    const Complex beta = zkm * Complex(0.0, -1.0) * w;
                    lm.A(2 * i, col) += alpha.real();
                    lm.A(2 * i + 1, col) += alpha.imag();
                    lm.B(2 * i, col) += beta.real();
                    lm.B(2 * i + 1, col) += beta.imag();
                } else {
                    const Complex kappa = zkm * Complex(c.p_kw, -c.q_kvar) * w;
                    lm.d(2 * i) -= kappa.real();
                    lm.d(2 * i + 1) -= kappa.imag();
                }
            }
        }
    }

    std::vector<Vector> e_rows;
    std::vector<double> f_vals;
    auto push = [&](Vector row, double rhs, std::string tag) {
        e_rows.push_back(std::move(row));
        f_vals.push_back(rhs);
        lm.row_tags.push_back(std::move(tag));
    };

    // |V| ~ Re(V e^{-j theta_nom})
    for (std::size_t i = 0; i < lm.v_index.size(); ++i) {
        const auto [b, ph] = lm.v_index[i];
        const double th = std::arg(vn[b][static_cast<std::size_t>(ph)]);
        Vector row = Vector::Zero(nv);
        row(2 * static_cast<Eigen::Index>(i)) = std::cos(th);
        row(2 * static_cast<Eigen::Index>(i) + 1) = std::sin(th);
        push(row, net.buses[b].v_max, "vmax:" + bus_phase_tag(net, b, ph));
        push(-row, -net.buses[b].v_min, "vmin:" + bus_phase_tag(net, b, ph));
    }

    // |I| <= i_max through the octagon Re(I e^{-j k pi/4}) <= i_max cos(pi/8), I = Z^-1 (V_parent - V_b)
    const double ib = net.i_base_a();
    for (std::size_t b : topo.order) {
        if (b == topo.root) continue;
        const std::size_t l = topo.parent_line[b];
        if (!net.lines[l].i_max_a) continue;
        const auto phases = net.buses[b].phases.list();
        const auto nph = static_cast<Eigen::Index>(phases.size());
        Eigen::MatrixXcd zsub(nph, nph);
        for (Eigen::Index r = 0; r < nph; ++r)
            for (Eigen::Index s = 0; s < nph; ++s)
                zsub(r, s) = net.lines[l].z_ohm(static_cast<int>(phases[static_cast<std::size_t>(r)]),
                                                static_cast<int>(phases[static_cast<std::size_t>(s)])) / zb;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(zsub);
        if (!lu.isInvertible()) throw Error("singular impedance on line " + net.lines[l].from_bus + "-" + net.lines[l].to_bus);
        const Eigen::MatrixXcd y = lu.inverse();
        const double bound = *net.lines[l].i_max_a / ib * std::cos(M_PI / 8.0);
        const std::size_t par = topo.parent[b];
        for (Eigen::Index r = 0; r < nph; ++r) {
            for (int dir = 0; dir < 8; ++dir) {
                const Complex rot = std::polar(1.0, -dir * M_PI / 4.0);
                Vector row = Vector::Zero(nv);
                double rhs = bound;
                for (Eigen::Index s = 0; s < nph; ++s) {
                    const int m = static_cast<int>(phases[static_cast<std::size_t>(s)]);
                    const Complex g = rot * y(r, s);
                    const Eigen::Index bi = vidx.at({b, m});
                    row(2 * bi) -= g.real();
                    row(2 * bi + 1) += g.imag();
                    if (par == topo.root) {
                        rhs -= (g * net.v_ref[static_cast<std::size_t>(m)]).real();
                    } else {
                        const Eigen::Index pi = vidx.at({par, m});
                        row(2 * pi) += g.real();
                        row(2 * pi + 1) -= g.imag();
                    }
                }
                push(row, rhs,
                     "imax:" + net.lines[l].from_bus + "-" + net.lines[l].to_bus + "." +
                         phase_char(phases[static_cast<std::size_t>(r)]) + "/" + std::to_string(dir));
            }
        }
    }

    lm.E.resize(static_cast<Eigen::Index>(e_rows.size()), nv);
    lm.f.resize(static_cast<Eigen::Index>(f_vals.size()));
    for (std::size_t r = 0; r < e_rows.size(); ++r) {
        lm.E.row(static_cast<Eigen::Index>(r)) = e_rows[r].transpose();
        lm.f(static_cast<Eigen::Index>(r)) = f_vals[r];
    }
    return lm;
}

ParametricFR parametric_fr(const LinearModel& lm) {
    Eigen::FullPivLU<Matrix> lu(lm.C);
    if (!lu.isInvertible()) throw Error("linear model: C is singular");
    ParametricFR pf;
    const Matrix cinv_a = lu.solve(lm.A);
    const Matrix cinv_b = lu.solve(lm.B);
    const Vector cinv_d = lu.solve(lm.d);
    pf.M = -lm.E * cinv_a;
    pf.N = -lm.E * cinv_b;
    pf.r = lm.f - lm.E * cinv_d;
    // Sensitivities that are pure elimination round-off (e.g. a line current with
    // no active customer downstream) become exact zeros.
    const double big = std::max(pf.M.size() ? pf.M.cwiseAbs().maxCoeff() : 0.0, pf.N.size() ? pf.N.cwiseAbs().maxCoeff() : 0.0);
    const double floor = 1e-12 * big;
    pf.M = pf.M.unaryExpr([floor](double x) { return std::abs(x) <= floor ? 0.0 : x; });
    pf.N = pf.N.unaryExpr([floor](double x) { return std::abs(x) <= floor ? 0.0 : x; });
    pf.p_lo = lm.p_lo;
    pf.p_hi = lm.p_hi;
    pf.q_lo = lm.q_lo;
    pf.q_hi = lm.q_hi;
    pf.customer_ids = lm.customer_ids;
    pf.row_tags = lm.row_tags;
    return pf;
}

Polyhedron ParametricFR::at(const Vector& q) const {
    const Eigen::Index n = this->n();
    const Eigen::Index m = M.rows();
    if (q.size() != N.cols()) throw Error("reactive power vector has the wrong length");
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (q(j) < q_lo(j) - 1e-9 || q(j) > q_hi(j) + 1e-9)
            throw Error("reactive power of '" + customer_ids[static_cast<std::size_t>(j)] + "' is outside its bounds");
    Polyhedron p(Matrix::Zero(m + 2 * n, n), Vector(m + 2 * n));
    p.G.topRows(m) = M;
    p.g.head(m) = r - N * q;
    p.G.block(m, 0, n, n) = Matrix::Identity(n, n);
    p.g.segment(m, n) = p_hi;
    p.G.block(m + n, 0, n, n) = -Matrix::Identity(n, n);
    p.g.segment(m + n, n) = -p_lo;
    p.var_names = customer_ids;
    p.tags = row_tags;
    for (const auto& id : customer_ids) p.tags.push_back("phi:" + id);
    for (const auto& id : customer_ids) p.tags.push_back("plo:" + id);
    return p;
}

Polyhedron build_fr(const LinearModel& lm, const Vector& q) { return parametric_fr(lm).at(q); }

}  // namespace roekit
