#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bebsim/sim.hpp"
#include "bebsim/tco.hpp"

namespace bebsim {

struct SweepGrid {
    std::vector<int> bus_counts{58, 64};
    std::vector<double> battery_sizes_kwh{350.0, 400.0};
    std::vector<int> fast_charger_counts{2, 4, 6, 8, 10, 12, 14};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

void validate_grid(const SweepGrid& grid);

struct SweepRun {
    int bus_count{};
    double battery_kwh{};
    int fast_chargers{};
    std::uint64_t seed{};
    double avg_wait_min{};
    double total_energy_kwh{};
    double total_distance_km{};
    long long passengers_served{};
    long long unserved_at_close{};
    long long strandings{};
    long long headway_violations{};
};

struct SweepCell {
    int bus_count{};
    double battery_kwh{};
    int fast_chargers{};
    double mean_wait_min{};
    double std_wait_min{}; // sample standard deviation over seeds
    double capital_usd{};
    double capital_delta_usd{}; // vs the cheapest cell in the grid
    long long strandings{};     // summed over seeds
    long long headway_violations{};
};

struct SweepReport {
    std::vector<SweepCell> cells; // bus-major, then battery, then charger count
    std::vector<SweepRun> runs;   // one row per (cell, seed)
    int seed_count{};
};

// Up-front capital of a fleet configuration: buses, initial battery packs,
// fast chargers (with installation) and the fixed slow-charger pool.
double cell_capital_usd(const BebCostModel& costs, int bus_count, double battery_kwh,
                        int fast_chargers);

// (n2 - n1) * (unit + install) for the fast-charger pool.
double charger_cost_delta(int n1, int n2, double unit_cost_usd, double install_cost_usd);

// Runs the simulation for every grid cell and seed. Demand depends only on
// the seed, so one PassengerSet per seed is shared across all cells.
SweepReport run_sweep(const RouteModel& route, const ServiceCalendar& cal,
                      const DemandParams& demand, const SimConfig& base_config,
                      const BebCostModel& costs, const SweepGrid& grid);

struct Recommendation {
    bool feasible{false};
    int bus_count{};
    double battery_kwh{};
    int fast_chargers{};
    double mean_wait_min{};
    double capital_usd{};
    double wait_tolerance_min{};
    std::vector<SweepCell> closest; // best near-misses when nothing is feasible
};

// Cheapest cell with mean wait within tolerance and zero strandings; ties are
// broken toward fewer chargers, then smaller battery, then fewer buses.
Recommendation recommend(const SweepReport& report, double wait_tolerance_min);

// Default tolerance: the diesel baseline's blended half-headway wait plus 10%.
// The blend uses the expected peak/off-peak passenger split implied by the
// demand rates and the calendar.
double default_wait_tolerance_min(const BaselineDieselOps& baseline,
                                  const ServiceCalendar& cal, const DemandParams& demand);

} // namespace bebsim
