#include "bebsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bebsim/demand.hpp"
#include "bebsim/errors.hpp"

namespace bebsim {

void validate_grid(const SweepGrid& grid) {
    if (grid.bus_counts.empty() || grid.battery_sizes_kwh.empty() ||
        grid.fast_charger_counts.empty() || grid.seeds.empty())
        throw ValidationError("sweep: all grid dimensions must be non-empty");
    for (const int b : grid.bus_counts)
        if (b <= 0) throw ValidationError("sweep: bus counts must be positive");
    for (const double kwh : grid.battery_sizes_kwh)
        if (kwh <= 0.0) throw ValidationError("sweep: battery sizes must be positive");
    for (const int c : grid.fast_charger_counts)
        if (c <= 0) throw ValidationError("sweep: fast charger counts must be positive");
}

double cell_capital_usd(const BebCostModel& costs, int bus_count, double battery_kwh,
                        int fast_chargers) {
    return bus_count * (costs.bus_cost_usd + battery_kwh * costs.battery_cost_per_kwh) +
           fast_chargers * (costs.fast_charger.unit_cost_usd + costs.fast_charger.install_cost_usd) +
           costs.slow_charger.count *
               (costs.slow_charger.unit_cost_usd + costs.slow_charger.install_cost_usd);
}

double charger_cost_delta(int n1, int n2, double unit_cost_usd, double install_cost_usd) {
    if (n2 < n1)
        throw ValidationError("sweep: charger_cost_delta requires n2 >= n1");
    return static_cast<double>(n2 - n1) * (unit_cost_usd + install_cost_usd);
}

SweepReport run_sweep(const RouteModel& route, const ServiceCalendar& cal,
                      const DemandParams& demand, const SimConfig& base_config,
                      const BebCostModel& costs, const SweepGrid& grid) {
    validate_grid(grid);
    validate_config(base_config);

    // Demand is independent of fleet configuration: generate once per seed.
    std::map<std::uint64_t, PassengerSet> demand_by_seed;
    for (const std::uint64_t seed : grid.seeds) {
        if (!demand_by_seed.count(seed))
            demand_by_seed.emplace(seed, generate_day_demand(route, cal, demand, seed));
    }

    SweepReport report;
    report.seed_count = static_cast<int>(grid.seeds.size());
    double min_capital = std::numeric_limits<double>::max();

    for (const int buses : grid.bus_counts) {
        for (const double battery : grid.battery_sizes_kwh) {
            for (const int chargers : grid.fast_charger_counts) {
                SimConfig cfg = base_config;
                cfg.bus_count = buses;
                cfg.bus.battery_kwh = battery;
                cfg.chargers.fast_count = chargers;

                SweepCell cell;
                cell.bus_count = buses;
                cell.battery_kwh = battery;
                cell.fast_chargers = chargers;
                cell.capital_usd = cell_capital_usd(costs, buses, battery, chargers);
                min_capital = std::min(min_capital, cell.capital_usd);

                double sum = 0.0;
                double sumsq = 0.0;
                for (const std::uint64_t seed : grid.seeds) {
                    const SimResult r =
                        run_simulation(route, cal, cfg, demand_by_seed.at(seed), seed);
                    SweepRun run;
                    run.bus_count = buses;
                    run.battery_kwh = battery;
                    run.fast_chargers = chargers;
                    run.seed = seed;
                    run.avg_wait_min = r.avg_wait_min;
                    run.total_energy_kwh = r.total_energy_kwh;
                    run.total_distance_km = r.total_distance_km;
                    run.passengers_served = r.passengers_served;
                    run.unserved_at_close = r.unserved_at_close;
                    run.strandings = static_cast<long long>(r.strandings.size());
                    run.headway_violations = r.headway_violations;
                    report.runs.push_back(run);

                    sum += r.avg_wait_min;
                    sumsq += r.avg_wait_min * r.avg_wait_min;
                    cell.strandings += run.strandings;
                    cell.headway_violations += run.headway_violations;
                }
                const double n = static_cast<double>(grid.seeds.size());
                cell.mean_wait_min = sum / n;
                cell.std_wait_min =
                    n > 1.0 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0))) : 0.0;
                report.cells.push_back(cell);
            }
        }
    }
    for (SweepCell& cell : report.cells)
        cell.capital_delta_usd = cell.capital_usd - min_capital;
    return report;
}

Recommendation recommend(const SweepReport& report, double wait_tolerance_min) {
    if (report.cells.empty())
        throw ValidationError("sweep: cannot recommend from an empty report");

    Recommendation rec;
    rec.wait_tolerance_min = wait_tolerance_min;

    const SweepCell* best = nullptr;
    for (const SweepCell& cell : report.cells) {
        if (cell.mean_wait_min > wait_tolerance_min || cell.strandings > 0) continue;
        if (best == nullptr) {
            best = &cell;
            continue;
        }
        const auto key = [](const SweepCell& c) {
            return std::make_tuple(c.capital_usd, c.fast_chargers, c.battery_kwh, c.bus_count);
        };
        if (key(cell) < key(*best)) best = &cell;
    }

    if (best != nullptr) {
        rec.feasible = true;
        rec.bus_count = best->bus_count;
        rec.battery_kwh = best->battery_kwh;
        rec.fast_chargers = best->fast_chargers;
        rec.mean_wait_min = best->mean_wait_min;
        rec.capital_usd = best->capital_usd;
        return rec;
    }

    // No feasible configuration: report the closest cells by mean wait.
    std::vector<SweepCell> sorted = report.cells;
    std::sort(sorted.begin(), sorted.end(), [](const SweepCell& a, const SweepCell& b) {
        return std::make_tuple(a.strandings > 0, a.mean_wait_min, a.capital_usd) <
               std::make_tuple(b.strandings > 0, b.mean_wait_min, b.capital_usd);
    });
    const std::size_t n = std::min<std::size_t>(3, sorted.size());
    rec.closest.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n));
    return rec;
}

double default_wait_tolerance_min(const BaselineDieselOps& baseline,
                                  const ServiceCalendar& cal, const DemandParams& demand) {
    const OperatingMinutes mins = operating_minutes(cal);
    const double peak_expected = mins.peak * demand.lambda_peak;
    const double off_expected = mins.offpeak * demand.lambda_offpeak;
    const double total = peak_expected + off_expected;
    const double peak_share = total > 0.0 ? peak_expected / total : 0.0;
    return 1.10 * blended_half_headway_min(baseline, peak_share);
}

} // namespace bebsim
