#include "roekit/optbackend.hpp"

#include "roekit/log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roekit::opt {

SparseVec sparse_unit(Eigen::Index n, Eigen::Index i, double v) {
    SparseVec s(n);
    s.insert(i) = v;
    return s;
}

SparseVec to_sparse(const Vector& dense, double drop) {
    SparseVec s(dense.size());
    for (Eigen::Index i = 0; i < dense.size(); ++i)
        if (std::abs(dense(i)) > drop) s.insert(i) = dense(i);
    return s;
}

void LogConeProblem::add_bounds(Eigen::Index var, double lo, double hi) {
    if (std::isfinite(hi)) rows.push_back({sparse_unit(n, var, 1.0), hi});
    if (std::isfinite(lo)) rows.push_back({sparse_unit(n, var, -1.0), -lo});
}

namespace {

double dot(const SparseVec& a, const Vector& z) {
    double s = 0.0;
    for (SparseVec::InnerIterator it(a); it; ++it) s += it.value() * z(it.index());
    return s;
}

void axpy(double alpha, const SparseVec& a, Vector& out) {
    for (SparseVec::InnerIterator it(a); it; ++it) out(it.index()) += alpha * it.value();
}

void rank1(double alpha, const SparseVec& a, Matrix& H) {
    for (SparseVec::InnerIterator i(a); i; ++i)
        for (SparseVec::InnerIterator j(a); j; ++j) H(i.index(), j.index()) += alpha * i.value() * j.value();
}

double cone_lhs(const ConeRow& k, const Vector& z) {
    double ss = 0.0;
    for (const auto& f : k.F) {
        double y = dot(f, z);
        ss += y * y;
    }
    return std::sqrt(ss) + dot(k.h, z);
}

// Barrier-method state for: minimize t*(-objective) - sum log slacks.
class Barrier {
public:
    explicit Barrier(const LogConeProblem& p) : p_(p) {}

    /// Returns +inf outside the domain.
    double value(const Vector& z, double t) const {
        double v = 0.0;
        for (const auto& lt : p_.log_terms) {
            double arg = dot(lt.a, z) + lt.b;
            if (!(arg > 0.0)) return kInf;
            v -= t * lt.weight * std::log(arg);
        }
        if (p_.lin.size()) v -= t * p_.lin.dot(z);
        for (const auto& r : p_.rows) {
            double s = r.b - dot(r.a, z);
            if (!(s > 0.0)) return kInf;
            v -= std::log(s);
        }
        for (const auto& k : p_.cones) {
            double sigma = k.c - dot(k.h, z);
            if (!(sigma > 0.0)) return kInf;
            double yy = 0.0;
            for (const auto& f : k.F) {
                double y = dot(f, z);
                yy += y * y;
            }
            double D = sigma * sigma - yy;
            if (!(D > 0.0)) return kInf;
            v -= std::log(D);
        }
        return v;
    }

    void derivatives(const Vector& z, double t, Vector& g, Matrix& H) const {
        const Eigen::Index n = p_.n;
        g = Vector::Zero(n);
        H = Matrix::Zero(n, n);
        for (const auto& lt : p_.log_terms) {
            double arg = dot(lt.a, z) + lt.b;
            axpy(-t * lt.weight / arg, lt.a, g);
            rank1(t * lt.weight / (arg * arg), lt.a, H);
        }
        if (p_.lin.size()) g -= t * p_.lin;
        for (const auto& r : p_.rows) {
            double s = r.b - dot(r.a, z);
            axpy(1.0 / s, r.a, g);
            rank1(1.0 / (s * s), r.a, H);
        }
        // -log(sigma^2 - |y|^2), y = Fz, sigma = c - h'z:
        //   grad = (2/D) v,  Hess = (2/D)(F'F - hh') + (4/D^2) v v',  v = sigma h + F'y
        Vector v(n);
        std::vector<double> ys;
        for (const auto& k : p_.cones) {
            double sigma = k.c - dot(k.h, z);
            double yy = 0.0;
            ys.clear();
            for (const auto& f : k.F) {
                ys.push_back(dot(f, z));
                yy += ys.back() * ys.back();
            }
            double D = sigma * sigma - yy;
            v.setZero();
            axpy(sigma, k.h, v);
            for (std::size_t r = 0; r < k.F.size(); ++r) {
                axpy(ys[r], k.F[r], v);
                rank1(2.0 / D, k.F[r], H);
            }
            rank1(-2.0 / D, k.h, H);
            g += (2.0 / D) * v;
            H.noalias() += (4.0 / (D * D)) * v * v.transpose();
        }
    }

    double nu() const {
        return static_cast<double>(p_.rows.size()) + 2.0 * static_cast<double>(p_.cones.size());
    }

private:
    const LogConeProblem& p_;
};

struct CenterStats {
    bool ok = true;
    int steps = 0;
};

// Newton's method with backtracking on the barrier at fixed t.
CenterStats center(const Barrier& bar, Vector& z, double t, int max_steps) {
    CenterStats st;
    Vector g;
    Matrix H;
    double f = bar.value(z, t);
    for (int it = 0; it < max_steps; ++it) {
        bar.derivatives(z, t, g, H);
        double reg = 1e-14 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        H.diagonal().array() += reg;
        Eigen::LDLT<Matrix> ldlt(H);
        Vector dz = -ldlt.solve(g);
        if (!dz.allFinite()) {
            st.ok = false;
            return st;
        }
        double dec2 = -g.dot(dz);
        ++st.steps;
        if (dec2 / 2.0 <= 1e-10) return st;
        double alpha = 1.0;
        double fn = kInf;
        while (alpha > 1e-14) {
            fn = bar.value(z + alpha * dz, t);
            if (fn <= f - 0.25 * alpha * dec2) break;
            alpha *= 0.5;
        }
        if (!(fn < kInf) || alpha <= 1e-14) {
            // no progress possible at this precision
            return st;
        }
        z += alpha * dz;
        f = fn;
    }
    return st;
}

}  // namespace

double LogConeProblem::objective(const Vector& z) const {
    double v = 0.0;
    for (const auto& lt : log_terms) v += lt.weight * std::log(dot(lt.a, z) + lt.b);
    if (lin.size()) v += lin.dot(z);
    return v;
}

double LogConeProblem::max_violation(const Vector& z) const {
    double worst = -kInf;
    for (const auto& r : rows) worst = std::max(worst, dot(r.a, z) - r.b);
    for (const auto& k : cones) worst = std::max(worst, cone_lhs(k, z) - k.c);
    for (const auto& lt : log_terms) worst = std::max(worst, -(dot(lt.a, z) + lt.b));
    return worst;
}

namespace {

// Phase 1: minimize s subject to every constraint relaxed by s.
// Returns a strictly feasible point or nothing.
bool find_interior(const LogConeProblem& p, Vector& z, int& steps, std::string& why) {
    const Eigen::Index n = p.n;
    double s0 = p.max_violation(z);
    if (s0 < 0.0) return true;

    LogConeProblem aux(n + 1);
    const Eigen::Index sidx = n;
    auto lift = [&](const SparseVec& a) {
        SparseVec b(n + 1);
        for (SparseVec::InnerIterator it(a); it; ++it) b.insert(it.index()) = it.value();
        return b;
    };
    for (const auto& r : p.rows) {
        SparseVec a = lift(r.a);
        a.coeffRef(sidx) = -1.0;
        aux.rows.push_back({a, r.b});
    }
    for (const auto& k : p.cones) {
        ConeRow c;
        for (const auto& f : k.F) c.F.push_back(lift(f));
        c.h = lift(k.h);
        c.h.coeffRef(sidx) = -1.0;
        c.c = k.c;
        aux.cones.push_back(std::move(c));
    }
    for (const auto& lt : p.log_terms) {
        // a'z + b >= -s  (strictly positive once s < 0)
        SparseVec a = lift(lt.a);
        a *= -1.0;
        a.coeffRef(sidx) = -1.0;
        aux.rows.push_back({a, lt.b});
    }
    // keep the auxiliary problem bounded: s >= -1
    aux.rows.push_back({sparse_unit(n + 1, sidx, -1.0), 1.0});
    aux.lin = Vector::Zero(n + 1);
    aux.lin(sidx) = -1.0;

    Vector w(n + 1);
    w.head(n) = z;
    w(sidx) = s0 + 1.0;
    Barrier bar(aux);
    double t = 1.0;
    for (int outer = 0; outer < 60; ++outer) {
        CenterStats cs = center(bar, w, t, 100);
        steps += cs.steps;
        if (!cs.ok) {
            why = "phase 1 Newton system broke down";
            return false;
        }
        if (p.max_violation(w.head(n)) < 0.0 && w(sidx) < 0.0) {
            z = w.head(n);
            return true;
        }
        if (bar.nu() / t < 1e-10) break;
        t *= 10.0;
    }
    std::ostringstream os;
    os << "no strictly feasible point (phase 1 minimum relaxation " << w(sidx) << ")";
    why = os.str();
    return false;
}

}  // namespace

LogConeResult solve_logcone(const LogConeProblem& p, const SolverOptions& opts, const Vector* start) {
    LogConeResult res;
    Vector z = (start && start->size() == p.n) ? *start : Vector::Zero(p.n);
    std::string why;
    if (!find_interior(p, z, res.newton_steps, why)) {
        res.status = Status::Infeasible;
        res.diagnostics = why;
        return res;
    }

    Barrier bar(p);
    const double nu = std::max(1.0, bar.nu());
    // initial t balances objective and barrier gradients
    double t = 1.0;
    for (int outer = 0; outer < opts.max_iter; ++outer) {
        CenterStats cs = center(bar, z, t, 200);
        res.newton_steps += cs.steps;
        if (!cs.ok) {
            res.status = Status::Failure;
            res.diagnostics = "Newton system broke down (loss of interiority)";
            res.z = z;
            return res;
        }
        res.gap = nu / t;
        if (res.gap <= opts.gap_tol) break;
        t *= 20.0;
    }
    res.z = z;
    res.value = p.objective(z);
    if (!std::isfinite(res.value)) {
        res.status = Status::Unbounded;
        res.diagnostics = "objective diverged";
        return res;
    }
    res.status = res.gap <= opts.gap_tol ? Status::Optimal : Status::Failure;
    if (res.status != Status::Optimal) {
        std::ostringstream os;
        os << "barrier stopped with gap bound " << res.gap << " after " << res.newton_steps << " Newton steps";
        res.diagnostics = os.str();
    }
    log().debug("logcone: {} vars, {} rows, {} cones, {} Newton steps, gap {:.2e}", p.n, p.rows.size(),
                p.cones.size(), res.newton_steps, res.gap);
    return res;
}

}  // namespace roekit::opt
