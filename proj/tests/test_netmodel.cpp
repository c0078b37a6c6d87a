#include "helpers.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace roekit;
using nlohmann::json;

namespace {

json two_bus_doc() { return json::parse(testing::read_text(testing::data_path("two_bus.json"))); }

std::string parse_error_path(const json& doc) {
    try {
        parse_network(doc.dump());
    } catch (const ParseError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("netmodel") {
    TEST_CASE("2-bus document") {
        const NetworkModel net = testing::two_bus();
        REQUIRE(net.buses.size() == 2);
        REQUIRE(net.lines.size() == 1);
        REQUIRE(net.customers.size() == 3);
        CHECK(net.reference_bus == "1");
        CHECK(net.customers[0].phase == Phase::B);
        CHECK(net.customers[1].phase == Phase::A);
        CHECK(net.customers[2].phase == Phase::C);
        CHECK(net.customers[1].kind == CustomerKind::Passive);
        CHECK(net.customers[1].p_kw == -2.0);
        CHECK(net.active_ids() == std::vector<std::string>{"1", "3"});
        CHECK(net.lines[0].z_ohm(1, 1) == Complex(0.3375, 1.0478));
        CHECK(net.lines[0].z_ohm(0, 2) == Complex(0.1580, 0.4236));
        CHECK(net.z_base_ohm() == doctest::Approx(230.94 * 230.94 / 1000.0));
    }

    TEST_CASE("customer on a phase the bus does not carry") {
        json doc = two_bus_doc();
        doc["buses"][1]["phases"] = "ab";
        doc["customers"][2]["phase"] = "c";
        CHECK(parse_error_path(doc) == "customers[2].phase");
    }

    TEST_CASE("round trip") {
        const NetworkModel a = testing::two_bus();
        const NetworkModel b = parse_network(serialize_network(a));
        CHECK(a == b);
        CHECK(serialize_network(b) == serialize_network(a));
        const NetworkModel s = synth_feeder(12, 9, 3);
        CHECK(parse_network(serialize_network(s)) == s);
    }

    TEST_CASE("validation errors name the element") {
        json doc = two_bus_doc();
        doc["buses"][1]["vmin_pu"] = 1.1;
        CHECK(parse_error_path(doc) == "buses[1]");

        doc = two_bus_doc();
        doc["lines"][0]["z_ohm"][0][1] = json::array({0.2, 0.5});
        CHECK(parse_error_path(doc) == "lines[0].z_ohm");

        doc = two_bus_doc();
        doc["lines"][0]["to"] = "9";
        CHECK(parse_error_path(doc) == "lines[0].to");

        doc = two_bus_doc();
        doc["buses"].push_back({{"id", "3"}, {"phases", "abc"}});
        CHECK(parse_error_path(doc) == "buses[2]");

        doc = two_bus_doc();
        doc["lines"].push_back(doc["lines"][0]);
        doc["lines"][1]["from"] = "2";
        doc["lines"][1]["to"] = "1";
        CHECK(parse_error_path(doc) == "lines[1]");

        doc = two_bus_doc();
        doc["customers"][0]["p_kw"] = 1.0;
        CHECK(parse_error_path(doc) == "customers[0].p_kw");

        doc = two_bus_doc();
        doc["customers"][1]["phi_kw"] = 1.0;
        CHECK(parse_error_path(doc) == "customers[1].phi_kw");

        doc = two_bus_doc();
        doc["customers"][0]["kind"] = "battery";
        CHECK(parse_error_path(doc) == "customers[0].kind");

        doc = two_bus_doc();
        doc["customers"][0]["bus"] = "1";
        CHECK(parse_error_path(doc) == "customers[0].bus");

        doc = two_bus_doc();
        doc["lines"][0]["imax_a"] = -3.0;
        CHECK(parse_error_path(doc) == "lines[0].imax_a");

        doc = two_bus_doc();
        doc.erase("source");
        CHECK(parse_error_path(doc) == "source");

        CHECK_THROWS_AS(parse_network("{}"), ParseError);
        CHECK_THROWS_AS(parse_network("not json"), ParseError);
    }

    TEST_CASE("statuses are parsed for active customers") {
        json doc = two_bus_doc();
        doc["customers"][0]["status"] = "importing";
        doc["customers"][2]["status"] = "exporting";
        const NetworkModel net = parse_network(doc.dump());
        CHECK(net.customers[0].status == CustomerStatus::Importing);
        CHECK(net.customers[2].status == CustomerStatus::Exporting);
        doc["customers"][0]["status"] = "sideways";
        CHECK(parse_error_path(doc) == "customers[0].status");
    }

    TEST_CASE("topology") {
        const NetworkModel net = synth_feeder(10, 6, 2);
        const Topology t = build_topology(net);
        CHECK(t.order.size() == net.buses.size());
        CHECK(t.order.front() == t.root);
        for (std::size_t k = 1; k < t.order.size(); ++k) {
            const std::size_t b = t.order[k];
            CHECK(t.parent_line[b] != Topology::npos);
            // parents come first in BFS order
            const auto pos_parent = std::find(t.order.begin(), t.order.end(), t.parent[b]) - t.order.begin();
            CHECK(pos_parent < static_cast<long>(k));
        }
    }

    TEST_CASE("minimal synthetic feeder") {
        const NetworkModel net = synth_feeder(2, 2, 0);
        CHECK(net.buses.size() == 2);
        CHECK(net.lines.size() == 1);
        CHECK(net.active_customers().size() == 2);
    }

    TEST_CASE("33-bus synthetic feeder") {
        const NetworkModel net = synth_feeder(33, 30, 7);
        CHECK(net.buses.size() == 33);
        CHECK(net.lines.size() == 32);
        CHECK(net.active_customers().size() == 30);
        int imp = 0, exp = 0;
        for (const auto& c : net.customers) {
            if (!c.active()) continue;
            imp += c.status == CustomerStatus::Importing;
            exp += c.status == CustomerStatus::Exporting;
            CHECK(c.p_lo_kw == -5.0);
            CHECK(c.p_hi_kw == 6.0);
        }
        CHECK(imp == 15);
        CHECK(exp == 15);
        CHECK_NOTHROW(build_topology(net));
    }

    TEST_CASE("synthetic feeder is deterministic per seed") {
        CHECK(synth_feeder(33, 30, 7) == synth_feeder(33, 30, 7));
        CHECK_FALSE(synth_feeder(33, 30, 7) == synth_feeder(33, 30, 8));
        CHECK_THROWS_AS(synth_feeder(3, 7, 1), Error);
        CHECK_THROWS_AS(synth_feeder(1, 1, 1), Error);
    }

    TEST_CASE("impedance scaling") {
        const NetworkModel net = testing::two_bus();
        const NetworkModel s = net.scaled_impedance(0.85);
        CHECK(s.lines[0].z_ohm(0, 0).real() == doctest::Approx(0.85 * 0.3465));
        CHECK(s.customers == net.customers);
    }
}
