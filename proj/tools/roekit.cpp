// roekit command-line front end.

#include "roekit/log.hpp"
#include "roekit/pipeline.hpp"
#include "roekit/utpf.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roekit;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kViolations = 3 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct Common {
    std::string net_path;
    std::string config_path;
    std::string statuses_path;
    std::string out_dir = ".";
    std::string format = "json";
    std::optional<bool> q_opt;
    std::optional<std::uint64_t> seed;
    std::optional<int> scenarios;
    std::optional<double> v_margin;
    std::optional<unsigned> threads;
};

CustomerStatus parse_status(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where, "expected a status string");
    try {
        return status_from_string(j.get<std::string>());
    } catch (const Error& e) {
        throw ParseError(where, e.what());
    }
}

std::map<std::string, CustomerStatus> read_statuses(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(path, "expected an object of customer id -> status");
    std::map<std::string, CustomerStatus> out;
    for (const auto& [id, v] : doc.items()) out[id] = parse_status(v, path + ":" + id);
    return out;
}

RoeConfig build_config(const Common& c) {
    RoeConfig cfg;
    if (!c.config_path.empty()) {
        json doc;
        try {
            doc = json::parse(read_file(c.config_path));
        } catch (const json::parse_error& e) {
            throw ParseError(c.config_path, std::string("not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw ParseError(c.config_path, "expected an object");
        try {
            for (const auto& [k, v] : doc.items()) {
                if (k == "optimize_q") cfg.optimize_q = v.get<bool>();
                else if (k == "use_statuses") cfg.use_statuses = v.get<bool>();
                else if (k == "eps_md") cfg.eps_md = v.get<double>();
                else if (k == "expand_tol") cfg.expand_tol = v.get<double>();
                else if (k == "expand_rounds") cfg.expand_rounds = v.get<int>();
                else if (k == "scenarios") cfg.scenarios = v.get<int>();
                else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
                else if (k == "v_margin") cfg.v_margin = v.get<double>();
                else if (k == "threads") cfg.threads = v.get<unsigned>();
                else if (k == "statuses") {
                    if (!v.is_object()) throw ParseError(c.config_path + ":statuses", "expected an object");
                    for (const auto& [id, s] : v.items()) cfg.statuses[id] = parse_status(s, c.config_path + ":statuses." + id);
                } else
                    throw ParseError(c.config_path + ":" + k, "unknown config key");
            }
        } catch (const json::type_error& e) {
            throw ParseError(c.config_path, std::string("wrong value type: ") + e.what());
        }
    }
    if (!c.statuses_path.empty()) {
        for (const auto& [id, s] : read_statuses(c.statuses_path)) cfg.statuses[id] = s;
        cfg.use_statuses = true;
    }
    if (c.q_opt) cfg.optimize_q = *c.q_opt;
    if (c.seed) cfg.seed = *c.seed;
    if (c.scenarios) cfg.scenarios = *c.scenarios;
    if (c.v_margin) cfg.v_margin = *c.v_margin;
    if (c.threads) cfg.threads = *c.threads;
    cfg.check();
    return cfg;
}

json config_json(const RoeConfig& cfg) {
    json st = json::object();
    for (const auto& [id, s] : cfg.statuses) st[id] = to_string(s);
    return {{"optimize_q", cfg.optimize_q}, {"use_statuses", cfg.use_statuses}, {"eps_md", cfg.eps_md},
            {"expand_tol", cfg.expand_tol}, {"expand_rounds", cfg.expand_rounds}, {"scenarios", cfg.scenarios},
            {"seed", cfg.seed},             {"v_margin", cfg.v_margin},         {"threads", cfg.threads},
            {"statuses", st}};
}

void write_manifest(const fs::path& dir, const std::string& command, const json& inputs, const json& config,
                    const json& timings, const std::vector<std::string>& outputs) {
    json m = {{"command", command},  {"tool", "roekit"}, {"version", kVersion}, {"inputs", inputs},
              {"config", config},    {"outputs", outputs}, {"timings_ms", timings}};
    if (config.contains("seed")) m["seed"] = config["seed"];
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

json timings_json(const StageTimings& t) {
    return {{"linearize", t.linearize_ms},   {"ellipsoid", t.ellipsoid_ms},         {"redundancy", t.redundancy_ms},
            {"expansion", t.expansion_ms}, {"certification", t.certification_ms}, {"total", t.total_ms}};
}

std::string polygon_csv(const Polyhedron& fr) {
    std::vector<Vector> v = ccw_order(enumerate_vertices(fr));
    std::ostringstream os;
    os << "p1_kw,p2_kw\n";
    if (v.empty()) return os.str();
    v.push_back(v.front());
    for (const auto& p : v) os << fmt_num(p(0)) << ',' << fmt_num(p(1)) << '\n';
    return os.str();
}

int cmd_compute(const Common& c, const std::string& method) {
    const RoeConfig cfg = build_config(c);
    const NetworkModel net = parse_network(read_file(c.net_path));
    const fs::path dir = c.out_dir;
    const auto t0 = std::chrono::steady_clock::now();
    EnvelopeSet env;
    json timings;
    if (method == "detmtd") {
        RoeConfig sc = cfg;
        env = detmtd_baseline(net, resolve_statuses(net, sc)).envelopes;
        timings = {{"total", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()}};
    } else {
        env = compute_roe(net, cfg);
        timings = timings_json(env.timings);
    }
    std::vector<std::string> outputs{"envelopes.json"};
    write_file(dir / "envelopes.json", env.to_json());
    if (method == "roe") {
        write_file(dir / "certificate.json", env.expansion.to_json());
        outputs.push_back("certificate.json");
    }
    if (c.format == "csv") {
        std::ostringstream os;
        os.precision(10);
        os << "id,export_kw,import_kw,q_kvar\n";
        for (const auto& ce : env.customers) os << ce.id << ',' << ce.export_kw << ',' << ce.import_kw << ',' << ce.q_kvar << '\n';
        write_file(dir / "envelopes.csv", os.str());
        outputs.push_back("envelopes.csv");
    }
    json config = config_json(cfg);
    config["method"] = method;
    write_manifest(dir, "compute", {{"net", c.net_path}}, config, timings, outputs);
    for (const auto& ce : env.customers)
        std::cout << ce.id << ": [" << fmt_num(ce.export_kw) << ", " << fmt_num(ce.import_kw) << "] kW, q "
                  << fmt_num(ce.q_kvar) << " kVar\n";
    return kOk;
}

int cmd_fr(const Common& c, const std::vector<double>& q_values, bool optimized) {
    const RoeConfig cfg = build_config(c);
    const NetworkModel net = parse_network(read_file(c.net_path));
    const ParametricFR pfr = parametric_fr(linearize(net));
    Vector q = Vector::Zero(pfr.N.cols());
    if (optimized) {
        q = max_inscribed_ellipsoid(pfr).q;
    } else if (!q_values.empty()) {
        if (static_cast<Eigen::Index>(q_values.size()) != q.size())
            throw Error("--q needs one value per active customer (" + std::to_string(q.size()) + ")");
        for (Eigen::Index k = 0; k < q.size(); ++k) q(k) = q_values[static_cast<std::size_t>(k)];
    } else {
        for (Eigen::Index k = 0; k < q.size(); ++k) q(k) = std::clamp(0.0, pfr.q_lo(k), pfr.q_hi(k));
    }
    const Polyhedron fr = pfr.at(q);
    const fs::path dir = c.out_dir;
    std::vector<std::string> outputs{"fr.json"};
    write_file(dir / "fr.json", fr.to_json());
    if (fr.dim() == 2) {
        write_file(dir / "fr_polygon.csv", polygon_csv(fr));
        outputs.push_back("fr_polygon.csv");
    }
    json config = config_json(cfg);
    config["q_kvar"] = std::vector<double>(q.data(), q.data() + q.size());
    write_manifest(dir, "fr", {{"net", c.net_path}}, config, json::object(), outputs);
    std::cout << "FR: " << fr.rows() << " rows over " << fr.dim() << " customers\n";
    return kOk;
}

int cmd_validate(const Common& c, const std::string& env_path) {
    const RoeConfig cfg = build_config(c);
    const NetworkModel net = parse_network(read_file(c.net_path));
    const EnvelopeSet env = EnvelopeSet::from_json(read_file(env_path));
    const auto t0 = std::chrono::steady_clock::now();
    const ValidationReport rep = monte_carlo_validate(net, env, cfg);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const fs::path dir = c.out_dir;
    write_file(dir / "validation.json", rep.to_json());
    write_file(dir / "validation.csv", rep.to_csv());
    write_manifest(dir, "validate", {{"net", c.net_path}, {"envelopes", env_path}}, config_json(cfg),
                   {{"total", ms}}, {"validation.json", "validation.csv"});
    for (const auto& k : rep.per_k)
        std::cout << "k=" << k.k << " |V| in [" << fmt_num(k.min_v) << ", " << fmt_num(k.max_v) << "], "
                  << k.violations << " violating scenarios\n";
    if (rep.total_violations() > 0 || rep.total_nonconverged() > 0) {
        for (const auto& s : rep.scenarios)
            if (s.violated || !s.converged)
                std::cerr << "violation: k=" << s.k << " scenario " << s.index
                          << (s.converged ? " bus " + s.worst_element + "." + s.worst_phase + " |V|=" + fmt_num(s.worst_v)
                                          : std::string(" power flow did not converge"))
                          << '\n';
        return kViolations;
    }
    return kOk;
}

int cmd_oracle_vertices(const Common& c, const std::string& poly_path) {
    const Polyhedron P = Polyhedron::from_json(read_file(poly_path));
    std::vector<Vector> v = enumerate_vertices(P);
    if (P.dim() == 2) v = ccw_order(v);
    const fs::path dir = c.out_dir;
    std::ostringstream os;
    for (Eigen::Index k = 0; k < P.dim(); ++k) os << (k ? "," : "") << "x" << k + 1;
    os << '\n';
    for (const auto& p : v) {
        for (Eigen::Index k = 0; k < p.size(); ++k) os << (k ? "," : "") << fmt_num(p(k));
        os << '\n';
    }
    write_file(dir / "vertices.csv", os.str());
    write_manifest(dir, "oracle vertices", {{"poly", poly_path}}, json::object(), json::object(), {"vertices.csv"});
    std::cout << v.size() << " vertices\n";
    return kOk;
}

int cmd_oracle_exact(const Common& c, const std::string& fr_path) {
    const Polyhedron P = Polyhedron::from_json(read_file(fr_path));
    if (P.dim() > 12) throw Error("exact-dfr supports at most 12 dimensions");
    // the box bounds only need to enclose the FR; its own extent is used when it is bounded
    Vector lo = Vector::Constant(P.dim(), -1e6), hi = Vector::Constant(P.dim(), 1e6);
    if (P.dim() <= 3) {
        const auto v = enumerate_vertices(P);
        if (!v.empty()) {
            lo = v.front();
            hi = v.front();
            for (const auto& p : v) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
        }
    }
    const Box b = exact_dfr_small(P, lo, hi);
    json out = {{"lo", std::vector<double>(b.lo.data(), b.lo.data() + b.lo.size())},
                {"hi", std::vector<double>(b.hi.data(), b.hi.data() + b.hi.size())},
                {"log_width", log_width_objective(b)}};
    const fs::path dir = c.out_dir;
    write_file(dir / "exact_dfr.json", out.dump(2) + "\n");
    write_manifest(dir, "oracle exact-dfr", {{"fr", fr_path}}, json::object(), json::object(), {"exact_dfr.json"});
    for (Eigen::Index k = 0; k < b.dim(); ++k) std::cout << "[" << fmt_num(b.lo(k)) << ", " << fmt_num(b.hi(k)) << "]\n";
    return kOk;
}

int cmd_oracle_boundary(const Common& c, int points) {
    const NetworkModel net = parse_network(read_file(c.net_path));
    const auto ids = net.active_ids();
    if (ids.size() != 2) throw Error("boundary tracing needs exactly 2 active customers");
    if (points < 2) throw Error("--points must be at least 2");
    const auto pts = trace_fr_boundary(net, ids[0], ids[1], points);
    std::vector<Vector> lower, upper;
    for (const auto& p : pts)
        if (p.feasible) {
            lower.push_back((Vector(2) << p.p_sweep_kw, p.p_min_kw).finished());
            upper.push_back((Vector(2) << p.p_sweep_kw, p.p_max_kw).finished());
        }
    // lower edge left to right, then upper edge right to left: counterclockwise
    std::ostringstream os;
    os << "p1_kw,p2_kw\n";
    std::vector<Vector> ring = lower;
    for (auto it = upper.rbegin(); it != upper.rend(); ++it) ring.push_back(*it);
    if (!ring.empty()) ring.push_back(ring.front());
    for (const auto& p : ring) os << fmt_num(p(0)) << ',' << fmt_num(p(1)) << '\n';
    const fs::path dir = c.out_dir;
    write_file(dir / "boundary.csv", os.str());
    write_manifest(dir, "oracle boundary", {{"net", c.net_path}}, {{"points", points}}, json::object(), {"boundary.csv"});
    std::cout << lower.size() << " feasible sweep points\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust operating envelopes for unbalanced distribution networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common c;

    auto add_io = [&](CLI::App* sub, bool net_required) {
        auto* o = sub->add_option("--net", c.net_path, "network description (JSON)")->check(CLI::ExistingFile);
        if (net_required) o->required();
        sub->add_option("--config", c.config_path, "pipeline config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", c.out_dir, "output directory");
        sub->add_option("--threads", c.threads, "worker cap (0 = hardware count)");
    };

    std::string method = "roe";
    auto* compute = app.add_subcommand("compute", "compute operating envelopes");
    add_io(compute, true);
    compute->add_option("--method", method, "roe or detmtd")->check(CLI::IsMember({"roe", "detmtd"}));
    compute->add_flag("--q-opt,!--no-q-opt", c.q_opt, "optimize reactive set-points");
    compute->add_option("--statuses", c.statuses_path, "customer statuses (JSON id -> importing|exporting|free)")
        ->check(CLI::ExistingFile);
    compute->add_option("--seed", c.seed, "RNG seed");
    compute->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::vector<double> q_values;
    bool optimized = false;
    auto* fr = app.add_subcommand("fr", "export the linear feasible region");
    add_io(fr, true);
    fr->add_option("--q", q_values, "reactive powers of the active customers (kVar)")->delimiter(',');
    fr->add_flag("--optimized", optimized, "use the reactive powers chosen by the ellipsoid step");
    fr->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::string env_path;
    auto* validate = app.add_subcommand("validate", "Monte Carlo validation of envelopes");
    add_io(validate, true);
    validate->add_option("--envelopes", env_path, "envelopes.json")->required()->check(CLI::ExistingFile);
    validate->add_option("--scenarios", c.scenarios, "scenarios per k");
    validate->add_option("--seed", c.seed, "RNG seed");
    validate->add_option("--v-margin", c.v_margin, "voltage margin (p.u.)");
    validate->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* oracle = app.add_subcommand("oracle", "brute-force reference computations");
    oracle->require_subcommand(1);
    std::string poly_path;
    auto* vertices = oracle->add_subcommand("vertices", "vertex enumeration (2-D/3-D)");
    vertices->add_option("--poly", poly_path, "polyhedron (JSON)")->required()->check(CLI::ExistingFile);
    vertices->add_option("--out", c.out_dir, "output directory");
    auto* exact = oracle->add_subcommand("exact-dfr", "best box by vertex-pattern enumeration");
    exact->add_option("--fr", poly_path, "polyhedron (JSON)")->required()->check(CLI::ExistingFile);
    exact->add_option("--out", c.out_dir, "output directory");
    int points = 50;
    auto* boundary = oracle->add_subcommand("boundary", "nonlinear FR boundary of two customers");
    boundary->add_option("--net", c.net_path, "network description (JSON)")->required()->check(CLI::ExistingFile);
    boundary->add_option("--points", points, "sweep points");
    boundary->add_option("--out", c.out_dir, "output directory");

    int synth_buses = 33, synth_active = 30;
    std::uint64_t synth_seed = 1;
    auto* synth = app.add_subcommand("synth", "write a seeded synthetic radial feeder");
    synth->add_option("--buses", synth_buses, "bus count including the source")->check(CLI::Range(2, 100000));
    synth->add_option("--active", synth_active, "active customers")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--out", c.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*compute) return cmd_compute(c, method);
        if (*fr) return cmd_fr(c, q_values, optimized);
        if (*validate) return cmd_validate(c, env_path);
        if (*vertices) return cmd_oracle_vertices(c, poly_path);
        if (*exact) return cmd_oracle_exact(c, poly_path);
        if (*boundary) return cmd_oracle_boundary(c, points);
        if (*synth) {
            const fs::path dir = c.out_dir;
            write_file(dir / "feeder.json", serialize_network(synth_feeder(synth_buses, synth_active, synth_seed)));
            write_manifest(dir, "synth", json::object(),
                           {{"buses", synth_buses}, {"active", synth_active}, {"seed", synth_seed}}, json::object(),
                           {"feeder.json"});
            return kOk;
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
