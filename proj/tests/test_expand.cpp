#include "helpers.hpp"

#include <doctest.h>

using namespace roekit;

namespace {

bool vertices_inside(const Box& b, const Polyhedron& P, double tol = 1e-8) {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << b.dim()); ++s)
        if (!P.contains(b.vertex(s), tol)) return false;
    return true;
}

ExpansionResult expand_example1() {
    const Polyhedron ex = testing::example1();
    const Box ep = ellipsoid_to_box(max_inscribed_ellipsoid(ex).ellipsoid);
    return expand_dfr({ep, ex, {}}, 1e-6, 50, 1);
}

}  // namespace

TEST_SUITE("expand") {
    TEST_CASE("box inside a box grows to the outer box") {
        const Vector lo = (Vector(2) << -2.0, -1.0).finished(), hi = (Vector(2) << 3.0, 4.0).finished();
        const Box init{(Vector(2) << -1.0, 0.0).finished(), (Vector(2) << 1.0, 1.0).finished()};
        const ExpansionResult r = expand_dfr({init, testing::box_poly(lo, hi), {}}, 1e-9, 50, 1);
        CHECK((r.expanded.lo - lo).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((r.expanded.hi - hi).cwiseAbs().maxCoeff() <= 1e-6);
        // increments in (import, export) order per coordinate
        CHECK(r.delta_f(0) == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(r.delta_f(1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.delta_f(2) == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(r.delta_f(3) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.certificate.contained);
    }

    TEST_CASE("Example 1 expansion improves and stays inside") {
        const Polyhedron ex = testing::example1();
        const ExpansionResult r = expand_example1();
        CHECK(r.certificate.contained);
        CHECK(r.expanded.contains(r.initial));
        CHECK(r.expanded.volume() >= r.initial.volume());
        CHECK(log_width_objective(r.expanded) >= log_width_objective(r.initial) - 1e-12);
        CHECK(vertices_inside(r.expanded, ex));
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
            CHECK(r.objective_trace[k] >= r.objective_trace[k - 1] - 1e-12);
        // never better than the exact enumeration
        const Box so = exact_dfr_small(ex, Vector::Constant(2, -10.0), Vector::Constant(2, 10.0));
        CHECK(log_width_objective(so) >= log_width_objective(r.expanded) - 1e-6);
    }

    TEST_CASE("locked sides stay put") {
        const Polyhedron ex = testing::example1();
        const Box init{(Vector(2) << -1.0, -1.0).finished(), (Vector(2) << 0.0, 0.5).finished()};
        // coordinate 0 exporting: its import side is locked
        const ExpansionResult r = expand_dfr({init, ex, {-1, 0}}, 1e-6, 50, 1);
        CHECK(r.delta_f(0) == 0.0);
        CHECK(r.expanded.hi(0) == 0.0);
        CHECK(r.expanded.lo(0) < -1.0);
        CHECK(vertices_inside(r.expanded, ex));
    }

    TEST_CASE("initial box outside the FR is rejected") {
        const Box bad{Vector::Constant(2, -5.0), Vector::Constant(2, 0.0)};
        CHECK_THROWS_AS(expand_dfr({bad, testing::example1(), {}}), Error);
    }

    TEST_CASE("2-bus base case stays close to the step-1 box") {
        ParametricFR pfr = parametric_fr(linearize(testing::two_bus()));
        const Polyhedron fr = pfr.at(Vector::Zero(2));
        const Box ep = ellipsoid_to_box(max_inscribed_ellipsoid(fr).ellipsoid);
        const ExpansionResult r = expand_dfr({ep, fr, {}}, 1e-6, 50, 1);
        CHECK(r.certificate.contained);
        CHECK((r.expanded.lo - ep.lo).cwiseAbs().maxCoeff() <= 0.1);
        CHECK((r.expanded.hi - ep.hi).cwiseAbs().maxCoeff() <= 0.1);
    }

    TEST_CASE("replaying certificates") {
        const Polyhedron ex = testing::example1();
        ExpansionResult r = expand_example1();
        CHECK(verify_expansion(r, ex));

        ExpansionResult zero = r;
        zero.delta_f.setZero();
        zero.expanded = zero.initial;
        CHECK(verify_expansion(zero, ex));

        // +1 kW on the first import bound
        ExpansionResult bad = r;
        bad.delta_f(0) += 1.0;
        bad.expanded.hi(0) += 1.0;
        std::optional<Vector> z;
        CHECK_FALSE(verify_expansion(bad, ex, &z));
        REQUIRE(z.has_value());
        CHECK_FALSE(ex.contains(*z, 1e-9));
        CHECK(bad.expanded.as_polyhedron().contains(*z, 1e-7));

        // increments that disagree with the stored box are not accepted
        ExpansionResult mismatch = r;
        mismatch.delta_f(1) += 0.5;
        CHECK_FALSE(verify_expansion(mismatch, ex));
    }

    TEST_CASE("JSON export") {
        const std::string j = expand_example1().to_json();
        CHECK(j.find("\"delta_f\"") != std::string::npos);
        CHECK(j.find("\"contained\": true") != std::string::npos);
    }
}
