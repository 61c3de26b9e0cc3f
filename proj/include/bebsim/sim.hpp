#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bebsim/demand.hpp"
#include "bebsim/route.hpp"

namespace bebsim {

struct BusSpec {
    int passenger_capacity{160};
    double battery_kwh{350.0};
    double usable_fraction{0.70};
    double energy_per_km{1.0 / 1.88}; // reciprocal of km-per-kWh mileage
    double avg_speed_kmh{40.0};
    double dwell_s{30.0};

    double usable_kwh() const { return battery_kwh * usable_fraction; }
};

// Fast chargers sit at the two terminals (split as evenly as possible, extra
// unit at the depot-side terminal); slow chargers are depot/overnight assets.
struct ChargerBank {
    int fast_count{10};
    double fast_kw{325.0};
    int slow_count{58};
    double slow_kw{150.0};
};

// When a bus plugs in at a terminal: after every leg that left it below the
// stop threshold (Arrival — terminal top-up operation), or only once it has
// fallen below the start threshold (Depleted).
enum class ChargeTrigger { Arrival, Depleted };

struct SimConfig {
    int bus_count{64};
    BusSpec bus;
    ChargerBank chargers;
    double charge_start_threshold{0.30}; // of usable capacity
    double charge_stop_threshold{0.95};  // of usable capacity
    ChargeTrigger charge_trigger{ChargeTrigger::Arrival};
    int headway_peak_s{135};
    int headway_offpeak_s{180};
    // Terminals tighten to the peak headway this long before a peak window
    // opens, so interior stations already see peak service when demand jumps.
    int dispatch_lead_s{1560};
    int turnaround_s{960};        // minimum terminal layover before redispatch
    double aux_kw{47.0};          // hotel load drawn while in service
    double charge_efficiency{1.0}; // battery kWh gained per grid kWh
};

void validate_config(const SimConfig& config);

enum class BusStatus { InService, Charging, QueuedForCharger, Depot };

struct StrandingEvent {
    int bus_id{};
    double minute{};
    double position_km{};
    int onboard{};
};

struct PerBusResult {
    int bus_id{};
    double distance_km{};
    double energy_kwh{};  // traction + auxiliary, battery side
    double charged_kwh{}; // battery side
    double final_soc_kwh{};
};

struct SimResult {
    double avg_wait_min{};                    // mean over boarded passengers
    std::vector<long long> wait_histogram;    // 1-minute bins, last bin = overflow
    std::vector<double> grid_load_kwh;        // grid draw per minute of the day
    std::vector<PerBusResult> per_bus;
    double total_distance_km{};
    double total_energy_kwh{}; // consumed by operation: traction + aux + charging losses
    double traction_kwh{};
    double aux_kwh{};
    double charging_grid_kwh{};
    double fast_charging_grid_kwh{};
    double slow_charging_grid_kwh{};
    long long passengers_total{};
    long long passengers_served{};
    long long unserved_at_close{};
    long long headway_violations{};
    std::vector<StrandingEvent> strandings;
    std::vector<std::pair<std::int64_t, double>> waits;   // (passenger id, wait minutes)
    std::vector<std::pair<std::int64_t, double>> alights; // (passenger id, alight minute)
    double peak_passenger_share{};
    int horizon_minutes{};
    // Extremes observed every step; property tests check the bounds.
    int max_onboard{};
    double min_soc_kwh{};
    double max_soc_kwh{};
};

// Minute-stepped day simulation: headway-driven dispatch from both terminals,
// all-stop service with alight-before-board and FIFO boarding up to capacity,
// battery depletion, terminal fast charging with queueing, and overnight slow
// charging at the depot (buses deadhead back after close). Deterministic for
// identical inputs; `seed` is reserved for stochastic policies and does not
// affect the current deterministic ones.
SimResult run_simulation(const RouteModel& route, const ServiceCalendar& cal,
                         const SimConfig& config, const PassengerSet& demand,
                         std::uint64_t seed = 0);

// Headway-slot dispatch decision. Slots become due every headway seconds and
// stay pending until a ready bus serves them; SlotLost flags a slot starved
// for more than one headway (counted as a headway violation each minute).
enum class DispatchDecision { Dispatch, Wait, SlotLost };
DispatchDecision dispatch_policy(double now_s, double next_due_s, int headway_s,
                                 bool ready_bus_available);

enum class ChargeAction { StartFast, QueueFast, StartSlow, Continue, Release };

// Charging decision for a bus standing at a terminal (or the depot after
// hours). Start when below the start threshold, hold the charger until the
// stop threshold, queue when no unit is free.
ChargeAction charging_policy(double soc_kwh, double usable_kwh, double start_threshold,
                             double stop_threshold, bool currently_charging,
                             bool fast_charger_free, bool overnight);

// The per-minute grid draw series accumulated by the run.
const std::vector<double>& grid_load_profile(const SimResult& result);

struct FleetComparison {
    double beb_avg_wait_min{};
    double baseline_wait_min{}; // half-headway proxy blended by passenger share
    double wait_delta_fraction{};
    double beb_total_distance_km{};
    double baseline_total_distance_km{};
    long long passengers_served{};
};

FleetComparison fleet_comparison(const SimResult& result, const BaselineDieselOps& baseline);

} // namespace bebsim
