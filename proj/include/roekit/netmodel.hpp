#pragma once

#include "roekit/common.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace roekit {

using Complex = std::complex<double>;

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

/// Bitmask over {a, b, c}.
struct PhaseSet {
    std::uint8_t bits = 0;

    bool contains(Phase p) const { return bits & (1u << static_cast<unsigned>(p)); }
    void insert(Phase p) { bits |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(p)); }
    bool empty() const { return bits == 0; }
    bool subset_of(PhaseSet o) const { return (bits & ~o.bits) == 0; }
    int size() const { return __builtin_popcount(bits); }
    std::vector<Phase> list() const;
    static PhaseSet all() { return PhaseSet{7}; }
    bool operator==(const PhaseSet&) const = default;
};

char phase_char(Phase p);
Phase phase_from_char(char c);

struct Bus {
    std::string id;
    PhaseSet phases;
    double v_min = 0.95;  ///< per unit
    double v_max = 1.05;
    bool operator==(const Bus&) const = default;
};

using Impedance3 = Eigen::Matrix3cd;

struct Line {
    std::string from_bus;
    std::string to_bus;
    Impedance3 z_ohm = Impedance3::Zero();
    std::optional<double> i_max_a;
    bool operator==(const Line&) const = default;
};

enum class CustomerKind : std::uint8_t { Active, Passive };
enum class CustomerStatus : std::uint8_t { Free, Importing, Exporting };

const char* to_string(CustomerStatus s);
CustomerStatus status_from_string(const std::string& s);

/// Demand convention: P > 0 imports (consumes), P < 0 exports. Q likewise > 0 absorbs.
struct Customer {
    std::string id;
    std::string bus;
    Phase phase = Phase::A;
    CustomerKind kind = CustomerKind::Passive;
    double p_kw = 0.0;  ///< passive only
    double q_kvar = 0.0;
    double p_lo_kw = 0.0;  ///< active only
    double p_hi_kw = 0.0;
    double q_lo_kvar = 0.0;
    double q_hi_kvar = 0.0;
    CustomerStatus status = CustomerStatus::Free;

    bool active() const { return kind == CustomerKind::Active; }
    bool operator==(const Customer&) const = default;
};

struct NetworkModel {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Customer> customers;
    std::string reference_bus;
    std::array<Complex, 3> v_ref{Complex(1.0, 0.0), std::polar(1.0, -2.0 * M_PI / 3.0),
                                 std::polar(1.0, 2.0 * M_PI / 3.0)};
    double s_base_kva = 1.0;  ///< per phase
    double v_base_v = 230.0;  ///< phase-to-neutral

    bool operator==(const NetworkModel&) const = default;

    /// Throws ParseError naming the offending element when an invariant fails.
    void validate() const;

    std::size_t bus_index(const std::string& id) const;
    std::vector<std::size_t> active_customers() const;
    std::vector<std::string> active_ids() const;

    double z_base_ohm() const { return v_base_v * v_base_v / (s_base_kva * 1000.0); }
    double i_base_a() const { return s_base_kva * 1000.0 / v_base_v; }

    /// Returns a copy with every line impedance multiplied by `factor`.
    NetworkModel scaled_impedance(double factor) const;
};

/// Tree view of a validated radial network.
struct Topology {
    std::size_t root = 0;
    std::vector<std::size_t> parent;       ///< parent bus (root: itself)
    std::vector<std::size_t> parent_line;  ///< line index feeding the bus (root: npos)
    std::vector<std::size_t> order;        ///< buses in BFS order from the root
    std::vector<std::vector<std::size_t>> children;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Builds the tree rooted at the reference bus; throws on cycles or islands.
Topology build_topology(const NetworkModel& net);

NetworkModel parse_network(const std::string& json_text);
std::string serialize_network(const NetworkModel& net);

/// Deterministic radial test feeder (bus 0 is the source).
NetworkModel synth_feeder(int n_buses, int n_active, std::uint64_t seed);

}  // namespace roekit
