#include "roekit/netmodel.hpp"

#include <algorithm>
#include <random>

namespace roekit {

namespace {

// Per-segment impedance: the 2-bus line matrix scaled down to a short LV cable run.
Impedance3 segment_impedance(double scale) {
    Impedance3 z;
    z << Complex(0.3465, 1.0179), Complex(0.1560, 0.5017), Complex(0.1580, 0.4236),
         Complex(0.1560, 0.5017), Complex(0.3375, 1.0478), Complex(0.1535, 0.3849),
         Complex(0.1580, 0.4236), Complex(0.1535, 0.3849), Complex(0.3414, 1.0348);
    return z * scale;
}

constexpr double kSegmentScaleMin = 0.010;
constexpr double kSegmentScaleMax = 0.022;
constexpr double kLineRatingA = 400.0;

}  // namespace

NetworkModel synth_feeder(int n_buses, int n_active, std::uint64_t seed) {
    if (n_buses < 2) throw Error("synth_feeder: need at least 2 buses");
    if (n_active < 1) throw Error("synth_feeder: need at least 1 active customer");
    const int slots = 3 * (n_buses - 1);
    if (n_active > slots)
        throw Error("synth_feeder: " + std::to_string(n_active) + " active customers exceed the " +
                    std::to_string(slots) + " attachable bus-phase slots");

    std::mt19937_64 rng(seed);
    NetworkModel net;
    net.reference_bus = "0";
    net.v_base_v = 230.0;
    for (int b = 0; b < n_buses; ++b) net.buses.push_back({std::to_string(b), PhaseSet::all(), 0.95, 1.05});

    // Random tree: each bus hangs off one of the three preceding buses, which
    // keeps the feeder long and thin like a residential LV run.
    std::uniform_real_distribution<double> seg(kSegmentScaleMin, kSegmentScaleMax);
    for (int b = 1; b < n_buses; ++b) {
        const int lo = std::max(0, b - 3);
        std::uniform_int_distribution<int> pick(lo, b - 1);
        const int parent = pick(rng);
        const double scale = b == 1 && n_buses == 2 ? 1.0 : seg(rng);
        net.lines.push_back({std::to_string(parent), std::to_string(b), segment_impedance(scale), kLineRatingA});
    }

    // Bus-phase slots in a seed-dependent order; active customers take slots
    // round-robin over phases a, b, c, passive ones fill the rest.
    std::vector<int> bus_order(static_cast<std::size_t>(n_buses - 1));
    for (int b = 1; b < n_buses; ++b) bus_order[static_cast<std::size_t>(b - 1)] = b;
    std::shuffle(bus_order.begin(), bus_order.end(), rng);
    std::vector<std::pair<int, Phase>> order;
    for (Phase ph : {Phase::A, Phase::B, Phase::C})
        for (int b : bus_order) order.emplace_back(b, ph);
    std::vector<std::pair<int, Phase>> active_slots;
    const std::size_t per_phase = bus_order.size();
    for (int k = 0; k < n_active; ++k) {
        const std::size_t ph = static_cast<std::size_t>(k % 3);
        const std::size_t j = static_cast<std::size_t>(k / 3);
        active_slots.push_back(order[ph * per_phase + j]);
    }

    std::uniform_real_distribution<double> load(0.3, 1.5);
    int next_passive = 1;
    for (const auto& [bus, ph] : order) {
        bool taken = false;
        for (std::size_t k = 0; k < active_slots.size(); ++k) {
            if (active_slots[k] != std::pair<int, Phase>{bus, ph}) continue;
            Customer c;
            c.id = "c" + std::to_string(k + 1);
            c.bus = std::to_string(bus);
            c.phase = ph;
            c.kind = CustomerKind::Active;
            c.p_lo_kw = -5.0;
            c.p_hi_kw = 6.0;
            c.q_lo_kvar = -3.0;
            c.q_hi_kvar = 3.0;
            c.status = k % 2 == 0 ? CustomerStatus::Exporting : CustomerStatus::Importing;
            net.customers.push_back(c);
            taken = true;
        }
        if (taken || n_buses == 2) continue;
        Customer c;
        c.id = "h" + std::to_string(next_passive++);
        c.bus = std::to_string(bus);
        c.phase = ph;
        c.kind = CustomerKind::Passive;
        c.p_kw = load(rng);
        c.q_kvar = 0.2 * c.p_kw;
        net.customers.push_back(c);
    }
    std::sort(net.customers.begin(), net.customers.end(), [](const Customer& a, const Customer& b) {
        auto key = [](const Customer& c) {
            return std::pair{c.active() ? 0 : 1, std::stoi(c.id.substr(1))};
        };
        return key(a) < key(b);
    });
    net.validate();
    return net;
}

}  // namespace roekit
