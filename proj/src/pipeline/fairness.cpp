#include "roekit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace roekit {

bool box_inside(const Box& b, const Polyhedron& fr, double tol) {
    for (Eigen::Index i = 0; i < fr.rows(); ++i) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < fr.dim(); ++k) worst += std::max(fr.G(i, k) * b.hi(k), fr.G(i, k) * b.lo(k));
        if (worst > fr.g(i) + tol * (1.0 + std::abs(fr.g(i)))) return false;
    }
    return true;
}

namespace {

// Largest t in [0, cap] with feasible(t), assuming feasibility is an interval starting at 0.
double max_step(const std::function<bool(double)>& feasible, double cap) {
    if (feasible(cap)) return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double condition(const Box& base, const Box& pert, const std::vector<bool>& use) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < base.dim(); ++k) {
        if (!use[static_cast<std::size_t>(k)]) continue;
        const double dplus = pert.hi(k) - base.hi(k);
        const double dminus = base.lo(k) - pert.lo(k);
        s += (dplus + dminus) / (base.hi(k) - base.lo(k));
    }
    return s;
}

}  // namespace

FairnessReport fairness_audit(const Ellipsoid& e, const Polyhedron& fr, int n_perturb, std::uint64_t seed,
                              const std::vector<int>* lambda, const Vector* delta) {
    const Eigen::Index n = e.dim();
    const double rn = 1.0 / std::sqrt(static_cast<double>(n));
    auto inscribed = [&](const Vector& L, const Vector& u) {
        if ((L.array() <= 0.0).any()) return false;
        for (Eigen::Index i = 0; i < fr.rows(); ++i)
            if (fr.G.row(i).cwiseProduct(L.transpose()).norm() + fr.G.row(i).dot(u) > fr.g(i)) return false;
        if (lambda && delta)
            for (Eigen::Index j = 0; j < n; ++j) {
                const int lam = (*lambda)[static_cast<std::size_t>(j)];
                if (lam != 0 && std::abs(u(j) - lam * L(j) * rn) > (*delta)(j) + 1e-12) return false;
            }
        return true;
    };

    FairnessReport rep;
    std::vector<bool> use(static_cast<std::size_t>(n), true);
    const Box base = ellipsoid_to_box(e);
    for (Eigen::Index k = 0; k < n; ++k)
        if (base.hi(k) - base.lo(k) <= 1e-9) {
            use[static_cast<std::size_t>(k)] = false;
            ++rep.skipped;
        }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double cap = e.L.maxCoeff();
    for (int s = 0; s < n_perturb; ++s) {
        Vector dL(n), du(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            dL(k) = gauss(rng);
            du(k) = gauss(rng);
            // a tight status row keeps u - lambda L / sqrt(n) fixed
            if (lambda && (*lambda)[static_cast<std::size_t>(k)] != 0) du(k) = (*lambda)[static_cast<std::size_t>(k)] * dL(k) * rn;
        }
        const double tmax = max_step([&](double t) { return inscribed(e.L + t * dL, e.u + t * du); }, cap);
        const double t = unif(rng) * tmax;
        const Box pert = ellipsoid_to_box({e.L + t * dL, e.u + t * du});
        rep.max_condition = std::max(rep.max_condition, condition(base, pert, use));
        ++rep.samples;
    }
    return rep;
}

FairnessReport fairness_audit(const EnvelopeSet& env, const Polyhedron& fr, int n_perturb, std::uint64_t seed) {
    const std::vector<int> lam = env.lambda();
    const bool statuses = std::any_of(lam.begin(), lam.end(), [](int l) { return l != 0; });
    return fairness_audit(env.ellipsoid, fr, n_perturb, seed, statuses ? &lam : nullptr,
                          statuses ? &env.status_delta : nullptr);
}

FairnessReport fairness_audit_box(const Box& b, const Polyhedron& fr, int n_perturb, std::uint64_t seed) {
    const Eigen::Index n = b.dim();
    FairnessReport rep;
    std::vector<bool> use(static_cast<std::size_t>(n), true);
    for (Eigen::Index k = 0; k < n; ++k)
        if (b.hi(k) - b.lo(k) <= 1e-9) {
            use[static_cast<std::size_t>(k)] = false;
            ++rep.skipped;
        }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double cap = std::max(1e-9, (b.hi - b.lo).maxCoeff());
    for (int s = 0; s < n_perturb; ++s) {
        Vector dp(n), dm(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const bool on = use[static_cast<std::size_t>(k)];
            dp(k) = on ? gauss(rng) : 0.0;
            dm(k) = on ? gauss(rng) : 0.0;
        }
        auto at = [&](double t) { return Box{b.lo - t * dm, b.hi + t * dp}; };
        const double tmax = max_step(
            [&](double t) {
                const Box c = at(t);
                return ((c.hi - c.lo).array() >= 0.0).all() && box_inside(c, fr, 0.0);
            },
            cap);
        rep.max_condition = std::max(rep.max_condition, condition(b, at(unif(rng) * tmax), use));
        ++rep.samples;
    }
    return rep;
}

}  // namespace roekit
