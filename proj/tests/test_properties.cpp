// Randomized small-instance property suite: passenger conservation, capacity
// and SoC bounds, per-bus energy conservation, and determinism. The acceptance
// binary runs the same generator at >= 1000 instances; this suite keeps a
// quicker spot-check in the unit run.

#include <cmath>
#include <doctest.h>

#include "bebsim/demand.hpp"
#include "bebsim/rng.hpp"
#include "bebsim/sim.hpp"

using namespace bebsim;

namespace {

struct RandomInstance {
    RouteModel route;
    ServiceCalendar cal;
    DemandParams demand;
    SimConfig config;
    std::uint64_t seed{};
};

RandomInstance random_instance(SplitMix64& rng) {
    RandomInstance inst;
    const int stations = 3 + static_cast<int>(rng.uniform_below(6)); // 3..8
    const double length = 2.0 + rng.next_double() * 8.0;
    inst.route = build_route(uniform_station_spec(stations, length));

    const int open = static_cast<int>(rng.uniform_below(300));
    const int span = 60 + static_cast<int>(rng.uniform_below(240));
    inst.cal.open_minute = open;
    inst.cal.close_minute = open + span;
    if (rng.bernoulli(0.7)) {
        const int ps = open + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(span / 2)));
        const int pe = ps + 10 + static_cast<int>(rng.uniform_below(
                                static_cast<std::uint64_t>(inst.cal.close_minute - ps - 5)));
        inst.cal.peak_windows.push_back(PeakWindow{ps, std::min(pe, inst.cal.close_minute)});
    }

    inst.demand.lambda_offpeak = rng.next_double() * 0.3;
    inst.demand.lambda_peak = inst.demand.lambda_offpeak + rng.next_double() * 0.5;
    const OperatingMinutes mins = operating_minutes(inst.cal);
    const double raw = stations * (mins.peak * inst.demand.lambda_peak +
                                   mins.offpeak * inst.demand.lambda_offpeak);
    inst.demand.target_daily_passengers =
        raw > 0.0 ? static_cast<long long>(raw * (0.5 + rng.next_double())) : 0;

    SimConfig& c = inst.config;
    c.bus_count = 1 + static_cast<int>(rng.uniform_below(6));
    c.bus.passenger_capacity = 5 + static_cast<int>(rng.uniform_below(36));
    c.bus.battery_kwh = 20.0 + rng.next_double() * 80.0;
    c.bus.usable_fraction = 0.5 + rng.next_double() * 0.5;
    c.bus.energy_per_km = 0.3 + rng.next_double() * 1.2;
    c.bus.avg_speed_kmh = 20.0 + rng.next_double() * 40.0;
    c.bus.dwell_s = 10.0 + rng.next_double() * 50.0;
    c.chargers.fast_count = static_cast<int>(rng.uniform_below(4));
    c.chargers.fast_kw = 50.0 + rng.next_double() * 300.0;
    c.chargers.slow_count = static_cast<int>(rng.uniform_below(3));
    c.chargers.slow_kw = 30.0 + rng.next_double() * 120.0;
    c.charge_start_threshold = 0.2 + rng.next_double() * 0.2;
    c.charge_stop_threshold = 0.8 + rng.next_double() * 0.2;
    c.headway_peak_s = 60 + static_cast<int>(rng.uniform_below(240));
    c.headway_offpeak_s = c.headway_peak_s + static_cast<int>(rng.uniform_below(300));
    c.turnaround_s = static_cast<int>(rng.uniform_below(300));
    c.aux_kw = 0.0;
    inst.seed = rng.next_u64();
    return inst;
}

void check_instance(const RandomInstance& inst) {
    const PassengerSet demand =
        generate_day_demand(inst.route, inst.cal, inst.demand, inst.seed);
    const SimResult r = run_simulation(inst.route, inst.cal, inst.config, demand, inst.seed);

    // Passenger conservation: served + unserved = total; boarded passengers
    // never board before arriving.
    CHECK(r.passengers_served + r.unserved_at_close == demand.total());
    CHECK(static_cast<long long>(r.waits.size()) >= r.passengers_served);
    for (const auto& [id, wait] : r.waits) {
        CHECK(wait >= 0.0);
        CHECK(id >= 0);
    }

    // Capacity and SoC bounds.
    CHECK(r.max_onboard <= inst.config.bus.passenger_capacity);
    CHECK(r.min_soc_kwh >= -1e-9);
    CHECK(r.max_soc_kwh <= inst.config.bus.usable_kwh() + 1e-9);

    // Per-bus energy conservation to 1e-9 kWh.
    for (const PerBusResult& b : r.per_bus) {
        const double residual =
            inst.config.bus.usable_kwh() + b.charged_kwh - b.energy_kwh - b.final_soc_kwh;
        CHECK(std::abs(residual) < 1e-9);
    }

    // Grid series conservation.
    double grid_sum = 0.0;
    for (const double kwh : r.grid_load_kwh) {
        CHECK(kwh >= 0.0);
        grid_sum += kwh;
    }
    CHECK(std::abs(grid_sum - r.charging_grid_kwh) < 1e-6);
}

} // namespace

TEST_SUITE("properties") {

TEST_CASE("random small instances hold the core invariants") {
    SplitMix64 rng(0xBEB51ULL);
    for (int trial = 0; trial < 200; ++trial) {
        const RandomInstance inst = random_instance(rng);
        CAPTURE(trial);
        check_instance(inst);
    }
}

TEST_CASE("random instances are deterministic under replay") {
    SplitMix64 rng(0xBEB52ULL);
    for (int trial = 0; trial < 10; ++trial) {
        const RandomInstance inst = random_instance(rng);
        const PassengerSet demand =
            generate_day_demand(inst.route, inst.cal, inst.demand, inst.seed);
        const SimResult a = run_simulation(inst.route, inst.cal, inst.config, demand, inst.seed);
        const SimResult b = run_simulation(inst.route, inst.cal, inst.config, demand, inst.seed);
        CHECK(a.avg_wait_min == b.avg_wait_min);
        CHECK(a.total_energy_kwh == b.total_energy_kwh);
        CHECK(a.total_distance_km == b.total_distance_km);
        CHECK(a.headway_violations == b.headway_violations);
        CHECK(a.strandings.size() == b.strandings.size());
    }
}

} // TEST_SUITE
