#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace roekit;

TEST_SUITE("linfr") {
    TEST_CASE("2-bus structure") {
        const LinearModel lm = linearize(testing::two_bus());
        CHECK(lm.n() == 2);
        CHECK(lm.E.rows() == 6);
        CHECK(lm.C.rows() == 6);
        CHECK(lm.row_tags == std::vector<std::string>{"vmax:2.a", "vmin:2.a", "vmax:2.b", "vmin:2.b", "vmax:2.c", "vmin:2.c"});
        CHECK(lm.customer_ids == std::vector<std::string>{"1", "3"});
        CHECK(lm.p_lo == Vector::Constant(2, -5.0));
        CHECK(lm.q_hi == Vector::Constant(2, 3.0));
    }

    TEST_CASE("2-bus sensitivities match the numpy derivation") {
        // tests/oracles/two_bus.py: rows M | N | r in kW, kVar
        const double ref[6][5] = {
            {-0.006684098953, 0.008359664565, 0.007236568554, 0.001405651052, 0.03700623788331692},
            {0.006684098953, -0.008359664565, -0.007236568554, -0.001405651052, 0.06299376211668317},
            {-0.006328130901, -0.004810939072, -0.01964626832, 0.006100972554, 0.06921820336142426},
            {0.006328130901, 0.004810939072, 0.01964626832, -0.006100972554, 0.03078179663857583},
            {0.007689066756, -0.006401255969, 0.001115909175, -0.019402518093, 0.03920567639517758},
            {-0.007689066756, 0.006401255969, -0.001115909175, 0.019402518093, 0.06079432360482251}};
        const ParametricFR pfr = parametric_fr(linearize(testing::two_bus()));
        REQUIRE(pfr.M.rows() == 6);
        for (int i = 0; i < 6; ++i) {
            CHECK(pfr.M(i, 0) == doctest::Approx(ref[i][0]).epsilon(1e-9));
            CHECK(pfr.M(i, 1) == doctest::Approx(ref[i][1]).epsilon(1e-9));
            CHECK(pfr.N(i, 0) == doctest::Approx(ref[i][2]).epsilon(1e-9));
            CHECK(pfr.N(i, 1) == doctest::Approx(ref[i][3]).epsilon(1e-9));
            CHECK(pfr.r(i) == doctest::Approx(ref[i][4]).epsilon(1e-10));
        }
    }

    TEST_CASE("near-zero impedance leaves only the box") {
        const LinearModel lm = linearize(testing::scaled(testing::two_bus(), 1e-9));
        const ParametricFR pfr = parametric_fr(lm);
        CHECK(pfr.M.cwiseAbs().maxCoeff() < 1e-9);
        const RedundancyResult red = remove_redundant(pfr.at(Vector::Zero(2)), 1);
        CHECK(red.reduced.rows() == 4);
        for (Eigen::Index i : red.kept) CHECK(i >= 6);
    }

    TEST_CASE("membership agrees with the voltage reconstruction") {
        const LinearModel lm = linearize(testing::two_bus());
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> pd(-5.0, 6.0), qd(-3.0, 3.0);
        int inside = 0;
        for (int t = 0; t < 1000; ++t) {
            Vector p(2), q(2);
            p << pd(rng), pd(rng);
            q << qd(rng), qd(rng);
            const Polyhedron fr = build_fr(lm, q);
            const Vector v = lm.voltages(p, q);
            const bool direct = ((lm.E * v - lm.f).array() <= 1e-9).all() && (p.array() >= lm.p_lo.array()).all() &&
                                (p.array() <= lm.p_hi.array()).all();
            CHECK(fr.contains(p, 1e-9) == direct);
            inside += direct;
        }
        // both outcomes are exercised
        CHECK(inside > 50);
        CHECK(inside < 950);
    }

    TEST_CASE("parametric instantiation equals build_fr") {
        const LinearModel lm = linearize(synth_feeder(8, 6, 4));
        const ParametricFR pfr = parametric_fr(lm);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> qd(-3.0, 3.0);
        for (int t = 0; t < 10; ++t) {
            Vector q(lm.n());
            for (Eigen::Index k = 0; k < q.size(); ++k) q(k) = qd(rng);
            const Polyhedron a = pfr.at(q), b = build_fr(lm, q);
            REQUIRE(a.rows() == b.rows());
            CHECK((a.G - b.G).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((a.g - b.g).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(a.tags == b.tags);
        }
        CHECK_THROWS_AS(pfr.at(Vector::Constant(lm.n(), 3.5)), Error);
    }

    TEST_CASE("no reactive coupling gives N = 0") {
        LinearModel lm = linearize(testing::two_bus());
        lm.B.setZero();
        CHECK(parametric_fr(lm).N.isZero(0.0));
    }

    TEST_CASE("empty E gives the box") {
        LinearModel lm = linearize(testing::two_bus());
        lm.E.resize(0, lm.E.cols());
        lm.f.resize(0);
        lm.row_tags.clear();
        const Polyhedron fr = build_fr(lm, Vector::Zero(2));
        CHECK(fr.rows() == 4);
        CHECK(fr.contains((Vector(2) << -5.0, 6.0).finished()));
        CHECK_FALSE(fr.contains((Vector(2) << -5.1, 0.0).finished()));
    }

    TEST_CASE("Example 1 fixture plus box rows") {
        const Polyhedron ex = testing::example1();
        CHECK(ex.rows() == 5);
        CHECK(ex.var_names == std::vector<std::string>{"P1", "P2"});
        const Polyhedron boxed = ex.stacked(testing::box_poly(Vector::Constant(2, -5.0), Vector::Constant(2, 6.0)));
        CHECK(boxed.rows() == 9);
        // the corner the text discusses is feasible, the all-out corner is not
        CHECK(boxed.contains((Vector(2) << -4.0, -4.0).finished()));
        CHECK_FALSE(boxed.contains((Vector(2) << -4.5, -4.0).finished()));
    }

    TEST_CASE("instantiation at the reported reactive set-points") {
        const LinearModel lm = linearize(testing::two_bus());
        const Vector q = (Vector(2) << 0.98, -1.02).finished();
        const Polyhedron a = parametric_fr(lm).at(q), b = build_fr(lm, q);
        CHECK((a.g - b.g).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((a.G - b.G).cwiseAbs().maxCoeff() <= 1e-12);
    }

    TEST_CASE("linear FR tracks the nonlinear boundary") {
        const NetworkModel net = testing::two_bus();
        const Polyhedron fr = parametric_fr(linearize(net)).at(Vector::Zero(2));
        const auto pts = trace_fr_boundary(net, "1", "3", 50);
        double gap = 0.0;
        bool lin_outside = false, nonlin_outside = false;
        for (const auto& bp : pts) {
            if (!bp.feasible) continue;
            double lo = -kInf, hi = kInf;
            for (Eigen::Index i = 0; i < fr.rows(); ++i) {
                const double a = fr.G(i, 1), rhs = fr.g(i) - fr.G(i, 0) * bp.p_sweep_kw;
                if (a > 1e-12) hi = std::min(hi, rhs / a);
                if (a < -1e-12) lo = std::max(lo, rhs / a);
            }
            gap = std::max({gap, std::abs(lo - bp.p_min_kw), std::abs(hi - bp.p_max_kw)});
            // points in one region but not the other, in both directions
            if (hi > bp.p_max_kw + 1e-3 || lo < bp.p_min_kw - 1e-3) lin_outside = true;
            if (hi < bp.p_max_kw - 1e-3 || lo > bp.p_min_kw + 1e-3) nonlin_outside = true;
        }
        const double hausdorff = testing::fr_hausdorff_gap(net, 50);
        MESSAGE("linear vs nonlinear FR: Hausdorff gap " << hausdorff << " kW, largest fixed-p1 gap " << gap << " kW");
        CHECK(hausdorff <= 0.5);
        CHECK(lin_outside);
        CHECK(nonlin_outside);
    }
}
