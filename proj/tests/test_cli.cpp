#include "helpers.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace roekit;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path log = dir / "stdout.txt";
    const std::string cmd = std::string(ROEKIT_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testing::read_text(log);
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("roekit_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<Vector> read_points(const fs::path& csv) {
    std::istringstream in(testing::read_text(csv));
    std::string line;
    std::getline(in, line);
    std::vector<Vector> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        pts.push_back(Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    return pts;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string two_bus_path() { return testing::data_path("two_bus.json"); }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("compute writes the base-case envelopes") {
        const fs::path dir = scratch("compute");
        const Run r = run("compute --net " + two_bus_path() + " --no-q-opt --threads 1 --format csv --out " + dir.string(), dir);
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(testing::read_text(dir / "envelopes.json"));
        REQUIRE(j["customers"].size() == 2);
        CHECK(std::abs(j["customers"][0]["export_kw"].get<double>() + 3.81) <= 0.30);
        CHECK(std::abs(j["customers"][1]["import_kw"].get<double>() - 1.42) <= 0.30);
        CHECK(fs::exists(dir / "certificate.json"));
        CHECK(fs::exists(dir / "envelopes.csv"));
        const auto m = nlohmann::json::parse(testing::read_text(dir / "manifest.json"));
        CHECK(m["command"] == "compute");
        CHECK(m.contains("timings_ms"));
        CHECK(m["config"]["optimize_q"] == false);
    }

    TEST_CASE("reruns are byte-identical") {
        const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
        const std::string args = "compute --net " + two_bus_path() + " --seed 7 --out ";
        REQUIRE(run(args + a.string(), a).code == 0);
        REQUIRE(run(args + b.string() + " --threads 1", b).code == 0);
        CHECK(testing::read_text(a / "envelopes.json") == testing::read_text(b / "envelopes.json"));
        CHECK(testing::read_text(a / "certificate.json") == testing::read_text(b / "certificate.json"));
    }

    TEST_CASE("malformed input exits with 1") {
        const fs::path dir = scratch("bad");
        write(dir / "empty.json", "");
        Run r = run("compute --net " + (dir / "empty.json").string() + " --out " + dir.string(), dir);
        CHECK(r.code == 1);
        CHECK_FALSE(r.out.empty());
        write(dir / "cfg.json", "{\"unknown_key\": 1}");
        r = run("compute --net " + two_bus_path() + " --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir);
        CHECK(r.code == 1);
        CHECK(run("compute", dir).code == 1);
        CHECK(run("frobnicate", dir).code == 1);
        CHECK(run("--help", dir).code == 0);
    }

    TEST_CASE("fr polygon matches vertex enumeration") {
        const fs::path dir = scratch("fr");
        REQUIRE(run("fr --net " + two_bus_path() + " --q 0,0 --out " + dir.string(), dir).code == 0);
        const auto pts = read_points(dir / "fr_polygon.csv");
        REQUIRE(pts.size() >= 4);
        CHECK((pts.front() - pts.back()).norm() == 0.0);
        double area2 = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) area2 += pts[k](0) * pts[k + 1](1) - pts[k + 1](0) * pts[k](1);
        CHECK(area2 > 0.0);

        const Polyhedron fr = parametric_fr(linearize(testing::two_bus())).at(Vector::Zero(2));
        const auto ref = ccw_order(enumerate_vertices(fr));
        REQUIRE(ref.size() + 1 == pts.size());
        for (const auto& v : ref) {
            double best = kInf;
            for (const auto& p : pts) best = std::min(best, (p - v).norm());
            CHECK(best <= 1e-8);
        }
        const Polyhedron back = Polyhedron::from_json(testing::read_text(dir / "fr.json"));
        CHECK(back.rows() == fr.rows());
        CHECK(run("fr --net " + two_bus_path() + " --q 0 --out " + dir.string(), dir).code == 1);
    }

    TEST_CASE("near-zero impedance FR is the box rectangle") {
        const fs::path dir = scratch("fr_box");
        write(dir / "net.json", serialize_network(testing::scaled(testing::two_bus(), 1e-9)));
        REQUIRE(run("fr --net " + (dir / "net.json").string() + " --out " + dir.string(), dir).code == 0);
        const auto pts = read_points(dir / "fr_polygon.csv");
        REQUIRE(pts.size() == 5);
        for (const auto& p : pts) {
            CHECK(std::min(std::abs(p(0) + 5.0), std::abs(p(0) - 6.0)) <= 1e-6);
            CHECK(std::min(std::abs(p(1) + 5.0), std::abs(p(1) - 6.0)) <= 1e-6);
        }
    }

    TEST_CASE("validate exit codes") {
        const fs::path dir = scratch("validate");
        const std::string net = " --net " + two_bus_path();
        REQUIRE(run("compute" + net + " --out " + (dir / "roe").string(), dir).code == 0);
        write(dir / "st.json", "{\"1\": \"exporting\", \"3\": \"importing\"}");
        REQUIRE(run("compute" + net + " --method detmtd --statuses " + (dir / "st.json").string() + " --out " +
                        (dir / "det").string(),
                    dir)
                    .code == 0);

        Run r = run("validate" + net + " --envelopes " + (dir / "roe" / "envelopes.json").string() + " --scenarios 30 --out " +
                        (dir / "roe").string(),
                    dir);
        CHECK(r.code == 0);
        const auto j = nlohmann::json::parse(testing::read_text(dir / "roe" / "validation.json"));
        CHECK(j["total_violations"] == 0);
        CHECK(testing::read_text(dir / "roe" / "validation.csv").rfind("k,min_v,max_v,violations", 0) == 0);

        r = run("validate" + net + " --envelopes " + (dir / "det" / "envelopes.json").string() + " --out " +
                    (dir / "det").string(),
                dir);
        CHECK(r.code == 3);
        CHECK(r.out.find("violation") != std::string::npos);

        r = run("validate" + net + " --envelopes " + (dir / "roe" / "envelopes.json").string() + " --scenarios 0 --out " +
                    dir.string(),
                dir);
        CHECK(r.code == 1);
    }

    TEST_CASE("unreachable voltage limits exit with 2") {
        const fs::path dir = scratch("infeasible");
        NetworkModel net = testing::two_bus();
        // limits no power inside the box can reach
        for (auto& b : net.buses) {
            b.v_min = 1.2;
            b.v_max = 1.3;
        }
        write(dir / "net.json", serialize_network(net));
        CHECK(run("compute --net " + (dir / "net.json").string() + " --no-q-opt --out " + dir.string(), dir).code == 2);
    }

    TEST_CASE("oracle subcommands") {
        const fs::path dir = scratch("oracle");
        Run r = run("oracle vertices --poly " + testing::data_path("square.json") + " --out " + dir.string(), dir);
        REQUIRE(r.code == 0);
        CHECK(read_points(dir / "vertices.csv").size() == 4);

        r = run("oracle exact-dfr --fr " + testing::data_path("example1.json") + " --out " + dir.string(), dir);
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(testing::read_text(dir / "exact_dfr.json"));
        CHECK(j["log_width"].get<double>() == doctest::Approx(3.114995692).epsilon(1e-6));

        r = run("oracle boundary --net " + two_bus_path() + " --points 20 --out " + dir.string(), dir);
        REQUIRE(r.code == 0);
        const auto ring = read_points(dir / "boundary.csv");
        CHECK(ring.size() >= 10);
        CHECK((ring.front() - ring.back()).norm() == 0.0);
        CHECK(fs::exists(dir / "manifest.json"));
    }

    TEST_CASE("synth writes a parseable feeder") {
        const fs::path dir = scratch("synth");
        REQUIRE(run("synth --buses 12 --active 5 --seed 3 --out " + dir.string(), dir).code == 0);
        const NetworkModel net = parse_network(testing::read_text(dir / "feeder.json"));
        CHECK(net.buses.size() == 12);
        CHECK(net.active_ids().size() == 5);
    }
}
