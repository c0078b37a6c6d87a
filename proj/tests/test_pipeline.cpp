#include "helpers.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>

using namespace roekit;

namespace {

RoeConfig base_config() {
    RoeConfig cfg;
    cfg.optimize_q = false;
    cfg.threads = 1;
    return cfg;
}

// Certificate plus an independent vertex check against the full FR.
void check_certified(const EnvelopeSet& env) {
    REQUIRE(env.cert_full.contained);
    CHECK(verify_certificate(env.c_epe.as_polyhedron(), env.fr, env.cert_full.X));
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << env.c_epe.dim()); ++s)
        CHECK(env.fr.contains(env.c_epe.vertex(s), 1e-8));
}

NetworkModel single_customer() {
    NetworkModel net = testing::two_bus();
    net.customers.erase(net.customers.begin() + 2);
    return net;
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("2-bus base case") {
        const EnvelopeSet env = compute_roe(testing::two_bus(), base_config());
        check_certified(env);
        REQUIRE(env.customers.size() == 2);
        const double reference[2][2] = {{-3.81, 1.93}, {-4.06, 1.42}};
        for (std::size_t k = 0; k < 2; ++k) {
            MESSAGE("customer " << env.customers[k].id << ": [" << env.customers[k].export_kw << ", "
                                << env.customers[k].import_kw << "] kW");
            CHECK(std::abs(env.customers[k].export_kw - reference[k][0]) <= 0.30);
            CHECK(std::abs(env.customers[k].import_kw - reference[k][1]) <= 0.30);
            CHECK(env.customers[k].q_kvar == 0.0);
        }
        CHECK(env.c_epe.contains(env.c_ep));
        CHECK(env.cert_vertex_checked);
    }

    TEST_CASE("Q optimization enlarges the step-1 box") {
        RoeConfig cfg = base_config();
        const EnvelopeSet fixed = compute_roe(testing::two_bus(), cfg);
        cfg.optimize_q = true;
        const EnvelopeSet opt = compute_roe(testing::two_bus(), cfg);
        check_certified(opt);
        CHECK(opt.c_ep.volume() > fixed.c_ep.volume());
        CHECK(opt.q_star.size() == 2);
        for (Eigen::Index k = 0; k < 2; ++k) CHECK(std::abs(opt.q_star(k)) <= 3.0);
    }

    TEST_CASE("single active customer gets its whole interval") {
        const NetworkModel net = single_customer();
        const EnvelopeSet env = compute_roe(net, base_config());
        // interval by bisection on linear-FR membership
        const Polyhedron fr = parametric_fr(linearize(net)).at(Vector::Zero(1));
        auto edge = [&](double inside, double outside) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (inside + outside);
                (fr.contains(Vector::Constant(1, mid), 0.0) ? inside : outside) = mid;
            }
            return inside;
        };
        const double lo = fr.contains(Vector::Constant(1, -5.0), 0.0) ? -5.0 : edge(0.0, -5.0);
        const double hi = fr.contains(Vector::Constant(1, 6.0), 0.0) ? 6.0 : edge(0.0, 6.0);
        CHECK(env.customers[0].export_kw == doctest::Approx(lo).epsilon(1e-6));
        CHECK(env.customers[0].import_kw == doctest::Approx(hi).epsilon(1e-6));
    }

    TEST_CASE("statuses lock the unused side") {
        RoeConfig cfg = base_config();
        cfg.optimize_q = true;
        cfg.use_statuses = true;
        cfg.statuses = {{"1", CustomerStatus::Importing}, {"3", CustomerStatus::Exporting}};
        const EnvelopeSet env = compute_roe(testing::two_bus(), cfg);
        check_certified(env);
        CHECK(env.customers[0].export_kw == 0.0);
        CHECK(env.customers[0].import_kw > 0.0);
        CHECK(env.customers[1].import_kw == 0.0);
        CHECK(env.customers[1].export_kw < 0.0);
        CHECK(env.customers[0].status == 1);
        CHECK(env.customers[1].status == -1);

        cfg.statuses = {{"7", CustomerStatus::Importing}};
        CHECK_THROWS_AS(compute_roe(testing::two_bus(), cfg), Error);
    }

    TEST_CASE("DETmtd both importing saturates the box") {
        const DetmtdResult r = detmtd_baseline(testing::two_bus(), {1, 1});
        CHECK(r.p(0) == 6.0);
        CHECK(r.p(1) == 6.0);
        CHECK(r.envelopes.customers[0].import_kw == 6.0);
        CHECK(r.envelopes.customers[1].export_kw == 0.0);
        CHECK_THROWS_AS(detmtd_baseline(testing::two_bus(), {1, 0}), Error);
        CHECK_THROWS_AS(detmtd_baseline(testing::two_bus(), {1}), Error);
    }

    TEST_CASE("near-zero impedance gives the box bounds") {
        const NetworkModel net = testing::scaled(testing::two_bus(), 1e-9);
        for (const std::vector<int>& st : {std::vector<int>{1, 1}, {-1, 1}, {-1, -1}}) {
            const DetmtdResult r = detmtd_baseline(net, st);
            for (std::size_t k = 0; k < 2; ++k) CHECK(r.p(static_cast<Eigen::Index>(k)) == doctest::Approx(st[k] > 0 ? 6.0 : -5.0));
        }
        const EnvelopeSet env = compute_roe(net, base_config());
        for (const auto& c : env.customers) {
            CHECK(c.export_kw == doctest::Approx(-5.0).epsilon(1e-6));
            CHECK(c.import_kw == doctest::Approx(6.0).epsilon(1e-6));
        }
    }

    TEST_CASE("fairness condition on the step-1 box of Example 1") {
        const Polyhedron ex = testing::example1();
        const EllipsoidResult e = max_inscribed_ellipsoid(ex);
        const FairnessReport rep = fairness_audit(e.ellipsoid, ex, 1000, 4);
        CHECK(rep.samples == 1000);
        CHECK(rep.max_condition <= 1e-6);
    }

    TEST_CASE("fairness condition on a symmetric FR") {
        const Polyhedron sq = testing::box_poly(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
        const EllipsoidResult e = max_inscribed_ellipsoid(sq);
        CHECK(fairness_audit(e.ellipsoid, sq, 500, 5).max_condition <= 1e-6);
        // the square itself admits no box perturbation with positive gain
        const Box b{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
        CHECK(fairness_audit_box(b, sq, 200, 6).max_condition <= 1e-9);
    }

    TEST_CASE("fairness after expansion is informational") {
        const EnvelopeSet env = compute_roe(testing::two_bus(), base_config());
        const FairnessReport after = fairness_audit_box(env.c_epe, env.fr, 200, 8);
        MESSAGE("post-expansion condition value " << after.max_condition);
        CHECK(std::isfinite(after.max_condition));
        const FairnessReport before = fairness_audit(env, env.fr, 1000, 8);
        CHECK(before.max_condition <= 1e-6);
    }

    TEST_CASE("box-in-FR test") {
        const Polyhedron ex = testing::example1();
        CHECK(box_inside({Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)}, ex));
        CHECK_FALSE(box_inside({Vector::Constant(2, -4.5), Vector::Constant(2, 0.0)}, ex));
    }

    TEST_CASE("validation of proposed envelopes") {
        RoeConfig cfg = base_config();
        cfg.scenarios = 50;
        const NetworkModel net = testing::two_bus();
        const EnvelopeSet env = compute_roe(net, cfg);
        const ValidationReport rep = monte_carlo_validate(net, env, cfg);
        CHECK(rep.total_violations() == 0);
        CHECK(rep.total_nonconverged() == 0);
        REQUIRE(rep.per_k.size() == 2);
        CHECK(rep.scenarios.size() == 100);
        for (const auto& k : rep.per_k) {
            CHECK(k.min_v >= 0.95 - cfg.v_margin);
            CHECK(k.max_v <= 1.05 + cfg.v_margin);
        }
    }

    TEST_CASE("validation of DETmtd limits") {
        RoeConfig cfg = base_config();
        const NetworkModel net = testing::two_bus();
        const EnvelopeSet det = detmtd_baseline(net, {-1, 1}).envelopes;
        const ValidationReport rep = monte_carlo_validate(net, det, cfg);
        CHECK(rep.total_violations() >= 1);
    }

    TEST_CASE("zero envelopes reproduce the passive-load solution") {
        const NetworkModel net = testing::two_bus();
        EnvelopeSet env;
        for (const auto& id : net.active_ids()) env.customers.push_back({id, 0.0, 0.0, 0.0, 0});
        RoeConfig cfg = base_config();
        cfg.scenarios = 10;
        const ValidationReport rep = monte_carlo_validate(net, env, cfg);
        const PowerFlowSolution ref = solve_power_flow(net, Injection::passive_only(net));
        double lo = kInf, hi = -kInf;
        for (const auto& bus : ref.v)
            for (const auto& v : bus) {
                lo = std::min(lo, std::abs(v));
                hi = std::max(hi, std::abs(v));
            }
        for (const auto& k : rep.per_k) {
            CHECK(k.min_v == lo);
            CHECK(k.max_v == hi);
        }
    }

    TEST_CASE("validation is independent of the thread count") {
        const NetworkModel net = synth_feeder(8, 6, 2);
        RoeConfig cfg = base_config();
        cfg.scenarios = 20;
        const EnvelopeSet env = compute_roe(net, cfg);
        cfg.threads = 1;
        const std::string a = monte_carlo_validate(net, env, cfg).to_json();
        cfg.threads = 4;
        CHECK(monte_carlo_validate(net, env, cfg).to_json() == a);
    }

    TEST_CASE("validation rejects mismatched envelopes") {
        const NetworkModel net = testing::two_bus();
        EnvelopeSet env;
        env.customers.push_back({"1", -1.0, 1.0, 0.0, 0});
        CHECK_THROWS_AS(monte_carlo_validate(net, env, base_config()), Error);
        env.customers.push_back({"9", -1.0, 1.0, 0.0, 0});
        CHECK_THROWS_AS(monte_carlo_validate(net, env, base_config()), Error);
        RoeConfig cfg = base_config();
        cfg.scenarios = 0;
        CHECK_THROWS_AS(cfg.check(), Error);
    }

    TEST_CASE("report exports") {
        RoeConfig cfg = base_config();
        cfg.scenarios = 5;
        const NetworkModel net = testing::two_bus();
        const ValidationReport rep = monte_carlo_validate(net, compute_roe(net, cfg), cfg);
        const std::string csv = rep.to_csv();
        CHECK(csv.rfind("k,min_v,max_v,violations\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        const auto j = nlohmann::json::parse(rep.to_json());
        CHECK(j["per_k"].size() == 2);
        CHECK(j["scenarios"][0].contains("worst"));
    }

    TEST_CASE("envelope JSON") {
        const EnvelopeSet env = compute_roe(testing::two_bus(), base_config());
        const std::string text = env.to_json();
        CHECK(compute_roe(testing::two_bus(), base_config()).to_json() == text);
        CHECK(text.find("timings_ms") == std::string::npos);
        CHECK(env.to_json(true).find("timings_ms") != std::string::npos);
        const EnvelopeSet back = EnvelopeSet::from_json(text);
        REQUIRE(back.customers.size() == 2);
        CHECK(back.customers[0].export_kw == env.customers[0].export_kw);
        CHECK(back.customers[1].import_kw == env.customers[1].import_kw);
        CHECK(back.method == "roe");
        CHECK_THROWS_AS(EnvelopeSet::from_json("{\"customers\": [{\"id\": 1}]}"), ParseError);
    }
}
