#include "roekit/optbackend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace roekit::opt {

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::Failure: return "failure";
    }
    return "unknown";
}

LpProblem LpProblem::with_vars(Eigen::Index n) {
    LpProblem p;
    p.c = Vector::Zero(n);
    p.A_ub.resize(0, n);
    p.b_ub.resize(0);
    p.A_eq.resize(0, n);
    p.b_eq.resize(0);
    p.lower = Vector::Constant(n, -kInf);
    p.upper = Vector::Constant(n, kInf);
    return p;
}

void LpProblem::add_row(const Vector& a, double b) {
    A_ub.conservativeResize(A_ub.rows() + 1, num_vars());
    A_ub.row(A_ub.rows() - 1) = a.transpose();
    b_ub.conservativeResize(b_ub.size() + 1);
    b_ub(b_ub.size() - 1) = b;
}

void LpProblem::add_eq(const Vector& a, double b) {
    A_eq.conservativeResize(A_eq.rows() + 1, num_vars());
    A_eq.row(A_eq.rows() - 1) = a.transpose();
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq(b_eq.size() - 1) = b;
}

Eigen::Index LpProblem::num_constraints() const {
    Eigen::Index k = A_ub.rows() + A_eq.rows();
    for (Eigen::Index j = 0; j < num_vars(); ++j) {
        if (std::isfinite(lower(j))) ++k;
        if (std::isfinite(upper(j))) ++k;
    }
    return k;
}

namespace {

// min cost'w  s.t.  K w = rhs,  w >= 0   (dense tableau, two phases)
class StandardSimplex {
public:
    enum class Outcome { Optimal, Infeasible, Unbounded, IterationLimit };

    StandardSimplex(const Matrix& K, const Vector& rhs, const Vector& cost, int max_iter)
        : K_(K), rhs_(rhs), cost_(cost), max_iter_(max_iter) {
        rows_ = K_.rows();
        cols_ = K_.cols();
        sign_ = Vector::Ones(rows_);
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (rhs_(i) < 0) sign_(i) = -1.0;
        scale_ = std::max(1.0, cost_.size() ? cost_.cwiseAbs().maxCoeff() : 0.0);
    }

    Outcome run() {
        // Phase 1 on [K | I] with artificial costs.
        Eigen::Index total = cols_ + rows_;
        T_.resize(rows_, total);
        T_.leftCols(cols_) = sign_.asDiagonal() * K_;
        T_.rightCols(rows_).setIdentity();
        beta_ = sign_.cwiseProduct(rhs_);
        basis_.resize(rows_);
        for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
        active_rows_.resize(rows_);
        for (Eigen::Index i = 0; i < rows_; ++i) active_rows_[i] = i;

        Vector phase1_cost = Vector::Zero(total);
        phase1_cost.tail(rows_).setOnes();
        allowed_ = total;
        Outcome o = iterate(phase1_cost, 1.0);
        if (o == Outcome::IterationLimit) return o;
        double infeas = phase1_cost_value(phase1_cost);
        if (infeas > 1e-9 * std::max(1.0, sign_.cwiseProduct(rhs_).cwiseAbs().maxCoeff())) {
            phase1_pi_ = multipliers(phase1_cost);
            return Outcome::Infeasible;
        }
        drive_out_artificials();

        Vector phase2_cost = Vector::Zero(total);
        phase2_cost.head(cols_) = cost_;
        allowed_ = cols_;
        o = iterate(phase2_cost, scale_);
        if (o == Outcome::Optimal) pi_ = multipliers(phase2_cost);
        return o;
    }

    int iterations() const { return iters_; }

    Vector solution() const {
        Vector w = Vector::Zero(cols_);
        for (std::size_t r = 0; r < basis_.size(); ++r)
            if (basis_[r] < cols_) w(basis_[r]) = std::max(0.0, beta_(static_cast<Eigen::Index>(r)));
        return w;
    }

    /// Multipliers for the original (unflipped) rows; dropped rows get 0.
    const Vector& pi() const { return pi_; }
    const Vector& phase1_pi() const { return phase1_pi_; }
    const Vector& ray() const { return ray_; }

private:
    double phase1_cost_value(const Vector& cost) const {
        double v = 0.0;
        for (std::size_t r = 0; r < basis_.size(); ++r) v += cost(basis_[r]) * beta_(static_cast<Eigen::Index>(r));
        return v;
    }

    Vector column(Eigen::Index j) const {
        Vector col = Vector::Zero(rows_);
        if (j < cols_)
            col = sign_.cwiseProduct(K_.col(j));
        else
            col(j - cols_) = 1.0;
        return col;
    }

    // Solves B'pi = c_B on the active rows and maps back to original row signs.
    Vector multipliers(const Vector& cost) const {
        Eigen::Index r = static_cast<Eigen::Index>(basis_.size());
        Matrix B(r, r);
        Vector cB(r);
        for (Eigen::Index k = 0; k < r; ++k) {
            Vector col = column(basis_[k]);
            for (Eigen::Index i = 0; i < r; ++i) B(i, k) = col(active_rows_[i]);
            cB(k) = cost(basis_[k]);
        }
        Vector y = r ? Vector(B.transpose().partialPivLu().solve(cB)) : Vector();
        Vector pi = Vector::Zero(rows_);
        for (Eigen::Index i = 0; i < r; ++i) pi(active_rows_[i]) = y(i) * sign_(active_rows_[i]);
        return pi;
    }

    void refactor() {
        Eigen::Index r = static_cast<Eigen::Index>(basis_.size());
        if (r == 0) return;
        Matrix B(r, r);
        Matrix full(r, T_.cols());
        for (Eigen::Index k = 0; k < r; ++k) {
            Vector col = column(basis_[k]);
            for (Eigen::Index i = 0; i < r; ++i) B(i, k) = col(active_rows_[i]);
        }
        for (Eigen::Index j = 0; j < T_.cols(); ++j) {
            Vector col = column(j);
            for (Eigen::Index i = 0; i < r; ++i) full(i, j) = col(active_rows_[i]);
        }
        Vector b(r);
        for (Eigen::Index i = 0; i < r; ++i) b(i) = sign_(active_rows_[i]) * rhs_(active_rows_[i]);
        Eigen::PartialPivLU<Matrix> lu(B);
        T_ = lu.solve(full);
        beta_ = lu.solve(b);
        for (Eigen::Index i = 0; i < r; ++i)
            if (beta_(i) < 0 && beta_(i) > -1e-9) beta_(i) = 0.0;
    }

    void pivot(Eigen::Index prow, Eigen::Index pcol) {
        double piv = T_(prow, pcol);
        T_.row(prow) /= piv;
        beta_(prow) /= piv;
        for (Eigen::Index i = 0; i < T_.rows(); ++i) {
            if (i == prow) continue;
            double f = T_(i, pcol);
            if (f == 0.0) continue;
            T_.row(i) -= f * T_.row(prow);
            beta_(i) -= f * beta_(prow);
        }
        basis_[prow] = pcol;
    }

    Outcome iterate(const Vector& cost, double cscale) {
        const double dtol = 1e-9 * cscale;
        const double ptol = 1e-9;
        int degenerate_streak = 0;
        int since_refactor = 0;
        while (true) {
            if (iters_ >= max_iter_) return Outcome::IterationLimit;
            // reduced costs d_j = c_j - c_B' T_j
            Vector cB(T_.rows());
            for (Eigen::Index i = 0; i < T_.rows(); ++i) cB(i) = cost(basis_[i]);
            Eigen::RowVectorXd d = cost.head(allowed_).transpose() - cB.transpose() * T_.leftCols(allowed_);

            bool bland = degenerate_streak > 30;
            Eigen::Index q = -1;
            double best = -dtol;
            for (Eigen::Index j = 0; j < allowed_; ++j) {
                if (d(j) < best) {
                    q = j;
                    if (bland) break;
                    best = d(j);
                }
            }
            if (q < 0) {
                if (since_refactor > 0) {
                    refactor();
                    since_refactor = 0;
                    continue;
                }
                return Outcome::Optimal;
            }

            Eigen::Index p = -1;
            double ratio = kInf;
            for (Eigen::Index i = 0; i < T_.rows(); ++i) {
                double a = T_(i, q);
                if (a <= ptol) continue;
                double r = std::max(0.0, beta_(i)) / a;
                bool take = false;
                if (r < ratio - 1e-12)
                    take = true;
                else if (r <= ratio + 1e-12 && p >= 0)
                    take = bland ? basis_[i] < basis_[p] : a > T_(p, q);
                if (take) {
                    ratio = r;
                    p = i;
                }
            }
            if (p < 0) {
                ray_ = Vector::Zero(cols_);
                if (q < cols_) ray_(q) = 1.0;
                for (Eigen::Index i = 0; i < T_.rows(); ++i)
                    if (basis_[i] < cols_) ray_(basis_[i]) = -T_(i, q);
                return Outcome::Unbounded;
            }
            degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
            pivot(p, q);
            ++iters_;
            if (++since_refactor >= 50) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < T_.rows();) {
            if (basis_[i] < cols_) {
                ++i;
                continue;
            }
            Eigen::Index j = -1;
            double best = 1e-9;
            for (Eigen::Index k = 0; k < cols_; ++k)
                if (std::abs(T_(i, k)) > best) {
                    best = std::abs(T_(i, k));
                    j = k;
                }
            if (j >= 0) {
                pivot(i, j);
                ++i;
                continue;
            }
            // redundant row: delete it
            Eigen::Index last = T_.rows() - 1;
            if (i != last) {
                T_.row(i) = T_.row(last);
                beta_(i) = beta_(last);
                basis_[i] = basis_[last];
                active_rows_[i] = active_rows_[last];
            }
            T_.conservativeResize(last, Eigen::NoChange);
            beta_.conservativeResize(last);
            basis_.pop_back();
            active_rows_.pop_back();
        }
        refactor();
    }

    const Matrix& K_;
    const Vector& rhs_;
    const Vector& cost_;
    int max_iter_;
    Eigen::Index rows_ = 0, cols_ = 0, allowed_ = 0;
    Vector sign_;
    double scale_ = 1.0;
    Matrix T_;
    Vector beta_;
    std::vector<Eigen::Index> basis_;
    std::vector<Eigen::Index> active_rows_;
    Vector pi_, phase1_pi_, ray_;
    int iters_ = 0;
};

// Inequality rows of the primal after folding in finite bounds.
struct FoldedRows {
    Matrix A;
    Vector b;
    std::vector<Eigen::Index> upper_var;  // row index -> variable for upper-bound rows
    std::vector<Eigen::Index> lower_var;
    Eigen::Index n_ub = 0;
};

FoldedRows fold(const LpProblem& p) {
    const Eigen::Index n = p.num_vars();
    FoldedRows f;
    f.n_ub = p.A_ub.rows();
    std::vector<Eigen::Index> up, lo;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isfinite(p.upper(j))) up.push_back(j);
        if (std::isfinite(p.lower(j))) lo.push_back(j);
    }
    const Eigen::Index m = f.n_ub + static_cast<Eigen::Index>(up.size() + lo.size());
    f.A = Matrix::Zero(m, n);
    f.b = Vector::Zero(m);
    f.A.topRows(f.n_ub) = p.A_ub;
    f.b.head(f.n_ub) = p.b_ub;
    Eigen::Index r = f.n_ub;
    for (auto j : up) {
        f.A(r, j) = 1.0;
        f.b(r++) = p.upper(j);
    }
    for (auto j : lo) {
        f.A(r, j) = -1.0;
        f.b(r++) = -p.lower(j);
    }
    f.upper_var = up;
    f.lower_var = lo;
    return f;
}

LpDuals unfold_duals(const LpProblem& p, const FoldedRows& f, const Vector& y, const Vector& zeq) {
    LpDuals d;
    const Eigen::Index n = p.num_vars();
    d.y_ub = y.head(f.n_ub);
    d.y_eq = zeq;
    d.y_up = Vector::Zero(n);
    d.y_lo = Vector::Zero(n);
    Eigen::Index r = f.n_ub;
    for (auto j : f.upper_var) d.y_up(j) = y(r++);
    for (auto j : f.lower_var) d.y_lo(j) = y(r++);
    return d;
}

struct DualSolve {
    StandardSimplex::Outcome outcome;
    Vector w;
    Vector pi;
    Vector phase1_pi;
    Vector ray;
    int iterations;
};

// Solves  min b'y + beq'z  s.t.  A'y + Aeq'z = c, y >= 0  (z split as z+ - z-).
DualSolve solve_dual(const FoldedRows& f, const LpProblem& p, const Vector& c, int max_iter) {
    const Eigen::Index m = f.A.rows(), pe = p.A_eq.rows(), n = c.size();
    Matrix K(n, m + 2 * pe);
    K.leftCols(m) = f.A.transpose();
    if (pe) {
        K.middleCols(m, pe) = p.A_eq.transpose();
        K.rightCols(pe) = -p.A_eq.transpose();
    }
    Vector cost(m + 2 * pe);
    cost.head(m) = f.b;
    if (pe) {
        cost.segment(m, pe) = p.b_eq;
        cost.tail(pe) = -p.b_eq;
    }
    StandardSimplex s(K, c, cost, max_iter);
    DualSolve out{s.run(), {}, {}, {}, {}, 0};
    out.iterations = s.iterations();
    out.w = s.solution();
    out.pi = s.pi();
    out.phase1_pi = s.phase1_pi();
    out.ray = s.ray();
    return out;
}

}  // namespace

LpResult solve_lp(const LpProblem& p, const SolverOptions& opts) {
    const Eigen::Index n = p.num_vars();
    LpResult res;
    if (!p.c.allFinite() || !p.A_ub.allFinite() || !p.b_ub.allFinite() ||
        (p.A_eq.size() && (!p.A_eq.allFinite() || !p.b_eq.allFinite()))) {
        res.diagnostics = "non-finite problem data";
        return res;
    }
    const FoldedRows f = fold(p);
    const Eigen::Index m = f.A.rows(), pe = p.A_eq.rows();
    const int max_iter = std::max(opts.max_iter, static_cast<int>(20 * (m + n + pe)));

    auto split = [&](const Vector& w, Vector& y, Vector& z) {
        y = w.head(m);
        z = pe ? Vector(w.segment(m, pe) - w.tail(pe)) : Vector();
    };

    // Primal feasibility test: dual with c = 0 is feasible; unbounded <=> infeasible.
    auto feasibility = [&](LpResult& r) -> bool {
        DualSolve fs = solve_dual(f, p, Vector::Zero(n), max_iter);
        r.iterations += fs.iterations;
        if (fs.outcome == StandardSimplex::Outcome::Unbounded) {
            Vector y, z;
            split(fs.ray, y, z);
            r.status = Status::Infeasible;
            r.duals = unfold_duals(p, f, y, z);
            return false;
        }
        if (fs.outcome != StandardSimplex::Outcome::Optimal) {
            r.status = Status::Failure;
            r.diagnostics = "feasibility subproblem hit the iteration limit";
            return false;
        }
        r.x = fs.pi;
        return true;
    };

    DualSolve ds = solve_dual(f, p, p.c, max_iter);
    res.iterations = ds.iterations;
    switch (ds.outcome) {
        case StandardSimplex::Outcome::Optimal: {
            res.status = Status::Optimal;
            res.x = ds.pi;
            res.value = p.c.dot(res.x);
            Vector y, z;
            split(ds.w, y, z);
            res.duals = unfold_duals(p, f, y, z);
            double viol = m ? (f.A * res.x - f.b).maxCoeff() : 0.0;
            if (pe) viol = std::max(viol, (p.A_eq * res.x - p.b_eq).cwiseAbs().maxCoeff());
            double scale = 1.0 + (m ? f.b.cwiseAbs().maxCoeff() : 0.0);
            if (viol > 1e3 * opts.feas_tol * scale) {
                std::ostringstream os;
                os << "primal residual " << viol << " after " << res.iterations << " pivots";
                res.diagnostics = os.str();
                res.status = Status::Failure;
            }
            return res;
        }
        case StandardSimplex::Outcome::Unbounded: {
            // dual unbounded => primal infeasible
            Vector y, z;
            split(ds.ray, y, z);
            res.status = Status::Infeasible;
            res.duals = unfold_duals(p, f, y, z);
            return res;
        }
        case StandardSimplex::Outcome::Infeasible: {
            // dual infeasible => primal infeasible or unbounded
            if (!feasibility(res)) return res;
            res.status = Status::Unbounded;
            res.ray = ds.phase1_pi;
            res.value = kInf;
            return res;
        }
        case StandardSimplex::Outcome::IterationLimit:
            res.status = Status::Failure;
            res.diagnostics = "simplex iteration limit reached";
            return res;
    }
    return res;
}

double check_farkas(const LpProblem& p, const LpDuals& w, double tol) {
    const Eigen::Index n = p.num_vars();
    if (w.y_ub.size() != p.A_ub.rows() || w.y_up.size() != n || w.y_lo.size() != n) return kInf;
    if ((w.y_ub.size() && w.y_ub.minCoeff() < -tol) || (n && (w.y_up.minCoeff() < -tol || w.y_lo.minCoeff() < -tol)))
        return kInf;
    Vector combo = p.A_ub.transpose() * w.y_ub + w.y_up - w.y_lo;
    double rhs = p.b_ub.dot(w.y_ub);
    if (p.A_eq.rows()) {
        combo += p.A_eq.transpose() * w.y_eq;
        rhs += p.b_eq.dot(w.y_eq);
    }
    double mass = 1.0 + w.y_ub.cwiseAbs().sum() + w.y_up.cwiseAbs().sum() + w.y_lo.cwiseAbs().sum() +
                  (w.y_eq.size() ? w.y_eq.cwiseAbs().sum() : 0.0);
    if (n && combo.cwiseAbs().maxCoeff() > tol * mass) return kInf;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (w.y_up(j) > tol) rhs += w.y_up(j) * p.upper(j);
        if (w.y_lo(j) > tol) rhs -= w.y_lo(j) * p.lower(j);
    }
    return rhs;
}

}  // namespace roekit::opt
