// Acceptance suite for the Lahore corridor scenario: one line per criterion,
// nonzero exit if any fails. Quantitative criteria run against the bundled
// defaults at the pinned tolerances; property criteria run randomized
// instances with fixed seeds so every run is reproducible bit for bit.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bebsim/commands.hpp"
#include "bebsim/demand.hpp"
#include "bebsim/io.hpp"
#include "bebsim/scenario.hpp"
#include "bebsim/sim.hpp"
#include "bebsim/sweep.hpp"
#include "bebsim/tco.hpp"

using namespace bebsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) { return fmt_fixed(v, 6); }

// Golden values pinned from the first accepted run of this configuration.
constexpr double kGoldenOptimizedWaitMin = 1.2762141808004759;
constexpr double kGoldenEmissionGapUsd = 6829115.90744681;

const SweepCell* find_cell(const SweepReport& r, int buses, double battery, int chargers) {
    for (const SweepCell& c : r.cells)
        if (c.bus_count == buses && c.battery_kwh == battery && c.fast_chargers == chargers)
            return &c;
    return nullptr;
}

// --- criteria 1-3: the paper grid sweep -----------------------------------

void criteria_sweep(const Scenario& s) {
    const SweepReport rep = run_sweep(s.route, s.calendar, s.demand, s.sim, s.beb_cost, s.sweep);
    const double tol =
        default_wait_tolerance_min(s.baseline, s.calendar, s.demand);

    const SweepCell* opt = find_cell(rep, 64, 350.0, 10);
    const bool c1_band = opt != nullptr && opt->mean_wait_min >= 0.65 && opt->mean_wait_min <= 1.30;
    const bool c1_golden =
        opt != nullptr && std::abs(opt->mean_wait_min - kGoldenOptimizedWaitMin) < 1e-9;
    report(1, c1_band && c1_golden,
           "optimized-scenario wait: mean over 10 seeds = " +
               (opt ? fmt(opt->mean_wait_min) : std::string("n/a")) +
               " min, band [0.65, 1.30], golden " + fmt(kGoldenOptimizedWaitMin));

    const SweepCell* small = find_cell(rep, 58, 350.0, 10);
    double reduction = 0.0;
    if (opt != nullptr && small != nullptr && small->mean_wait_min > 0.0)
        reduction = (small->mean_wait_min - opt->mean_wait_min) / small->mean_wait_min;
    report(2, opt != nullptr && small != nullptr && opt->mean_wait_min < small->mean_wait_min &&
                  reduction >= 0.05,
           "fleet-size effect at 10 chargers: 64 buses " + fmt(opt ? opt->mean_wait_min : 0) +
               " vs 58 buses " + fmt(small ? small->mean_wait_min : 0) + " min, reduction " +
               fmt_fixed(reduction * 100.0, 2) + "% (need >= 5%)");

    const Recommendation rec = recommend(rep, tol);
    const bool c3 = rec.feasible && rec.bus_count == 64 && rec.battery_kwh == 350.0 &&
                    rec.fast_chargers == 10;
    report(3, c3,
           "sweep recommendation at default tolerance " + fmt_fixed(tol, 4) + " min: " +
               (rec.feasible ? std::to_string(rec.bus_count) + " buses / " +
                                   fmt_fixed(rec.battery_kwh, 0) + " kWh / " +
                                   std::to_string(rec.fast_chargers) + " fast chargers"
                             : std::string("no feasible cell")) +
               " (expect 64 / 350 / 10)");
}

// --- criterion 4: demand calibration ---------------------------------------

void criterion_demand(const Scenario& s) {
    const double scale = calibrate_lambda(s.demand, s.calendar, s.route.station_count());
    bool ok = std::abs(scale - 0.52831) < 1e-5;
    std::string worst;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PassengerSet set = generate_day_demand(s.route, s.calendar, s.demand, seed);
        const double dev = std::abs(static_cast<double>(set.total()) - 95000.0) / 95000.0;
        if (dev > 0.02) {
            ok = false;
            worst = " seed " + std::to_string(seed) + " total " + std::to_string(set.total());
        }
    }
    report(4, ok,
           "demand calibration: scale = " + fmt(scale) +
               " (0.52831 +/- 1e-5); daily totals within 95000 +/- 2% for seeds 1..10" + worst);
}

// --- criterion 5: formula unit values --------------------------------------

void criterion_formulas() {
    const double fc = fuel_consumption(415.0, 2.0);
    const double ec = electricity_consumption(374.0, 1.88);
    const double p0 = direction_probability(0, 27);
    const double p13 = direction_probability(13, 27);
    const double p26 = direction_probability(26, 27);
    // Direct pmf evaluation: 3^3 / 3! * e^-3.
    const double pmf = std::pow(3.0, 3) / 6.0 * std::exp(-3.0);
    const bool ok = std::abs(fc - 207.5) < 1e-9 && std::abs(ec - 198.936) < 5e-4 &&
                    p0 == 1.0 && std::abs(p13 - 0.5) < 1e-12 && p26 == 0.0 &&
                    std::abs(pmf - 0.22404) < 1e-5;
    report(5, ok,
           "formulas: FC(415,2)=" + fmt_fixed(fc, 2) + " L, EC(374,1.88)=" + fmt_fixed(ec, 3) +
               " kWh, p(0)=" + fmt_fixed(p0, 2) + " p(13)=" + fmt_fixed(p13, 2) + " p(26)=" +
               fmt_fixed(p26, 2) + ", pmf(3;3)=" + fmt_fixed(pmf, 5));
}

// --- criteria 6-7: TCO ------------------------------------------------------

void criteria_tco(const Scenario& s) {
    const TCOResult diesel = compute_tco(s.diesel_cost, true);
    const TCOResult beb = compute_tco(s.beb_cost, true);
    const Breakeven with = breakeven_year(diesel.cumulative_with, beb.cumulative_with);
    const Breakeven without = breakeven_year(diesel.cumulative_without, beb.cumulative_without);
    const int life = s.beb_cost.study_life_years;
    const bool ok6 = with.crossed && without.crossed &&
                     with.fractional_year <= without.fractional_year && with.year_index > 0 &&
                     without.year_index > 0 && with.year_index < life && without.year_index < life;
    report(6, ok6,
           "breakeven ordering: with emissions year " + std::to_string(with.year_index) + " (" +
               std::to_string(s.beb_cost.start_year + with.year_index) + ") <= without year " +
               std::to_string(without.year_index) + " (" +
               std::to_string(s.beb_cost.start_year + without.year_index) +
               "), both inside the 12-year study");
    std::printf("               deviation report: computed totals (with emissions) diesel %.1fM /"
                " BEB %.1fM USD; the case-study reference totals 74.7M / 64.14M are not"
                " recomputable from its own unit figures\n",
                diesel.total_with / 1e6, beb.total_with / 1e6);

    const EmissionComparison em = emission_cost_comparison(diesel, beb);
    const bool ratio_ok = em.ratio >= 1.5;
    const bool golden_ok = std::abs(em.gap_usd - kGoldenEmissionGapUsd) < 1e-3;
    report(7, ratio_ok && golden_ok,
           "emission gap: diesel/BEB cumulative emission cost ratio " + fmt_fixed(em.ratio, 2) +
               " (need >= 1.5), gap " + fmt_fixed(em.gap_usd, 2) + " USD (golden " +
               fmt_fixed(kGoldenEmissionGapUsd, 2) + ")");
}

// --- criterion 8: randomized invariants ------------------------------------

struct RandomInstance {
    RouteModel route;
    ServiceCalendar cal;
    DemandParams demand;
    SimConfig config;
    std::uint64_t seed{};
};

RandomInstance random_instance(SplitMix64& rng) {
    RandomInstance inst;
    const int stations = 3 + static_cast<int>(rng.uniform_below(6));
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
    c.charge_trigger = rng.bernoulli(0.5) ? ChargeTrigger::Arrival : ChargeTrigger::Depleted;
    c.headway_peak_s = 60 + static_cast<int>(rng.uniform_below(240));
    c.headway_offpeak_s = c.headway_peak_s + static_cast<int>(rng.uniform_below(300));
    c.dispatch_lead_s = static_cast<int>(rng.uniform_below(1800));
    c.turnaround_s = static_cast<int>(rng.uniform_below(300));
    c.aux_kw = rng.bernoulli(0.3) ? rng.next_double() * 20.0 : 0.0;
    inst.seed = rng.next_u64();
    return inst;
}

void criterion_random_invariants() {
    SplitMix64 rng(0xACCE97ULL);
    int checked = 0;
    std::string failure;
    for (int trial = 0; trial < 1000 && failure.empty(); ++trial) {
        const RandomInstance inst = random_instance(rng);
        const PassengerSet demand =
            generate_day_demand(inst.route, inst.cal, inst.demand, inst.seed);
        const SimResult r = run_simulation(inst.route, inst.cal, inst.config, demand, inst.seed);
        ++checked;
        const auto fail = [&](const std::string& why) {
            failure = "trial " + std::to_string(trial) + ": " + why;
        };
        if (r.passengers_served + r.unserved_at_close != demand.total())
            fail("passenger conservation");
        if (r.max_onboard > inst.config.bus.passenger_capacity) fail("capacity bound");
        if (r.min_soc_kwh < -1e-9) fail("negative SoC");
        if (r.max_soc_kwh > inst.config.bus.usable_kwh() + 1e-9) fail("SoC above usable");
        for (const PerBusResult& b : r.per_bus) {
            const double residual = inst.config.bus.usable_kwh() + b.charged_kwh - b.energy_kwh -
                                    b.final_soc_kwh;
            if (std::abs(residual) >= 1e-9) fail("energy conservation residual");
        }
        for (const auto& [id, wait] : r.waits)
            if (wait < 0.0) fail("negative wait");
    }
    report(8, failure.empty(),
           "randomized invariants over " + std::to_string(checked) +
               " small instances (conservation, capacity, SoC bounds, energy balance 1e-9)" +
               (failure.empty() ? "" : ": " + failure));
}

// --- criterion 9: byte-identical reruns -------------------------------------

bool identical_outputs(const std::string& dir_a, const std::string& dir_b) {
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue; // carries wall-clock per its contract
        if (read_file(entry.path().string()) != read_file((fs::path(dir_b) / name).string()))
            return false;
    }
    return true;
}

void criterion_determinism(const Scenario& s) {
    CommandOptions opts;
    opts.quiet = true;
    opts.seed = 42;
    bool ok = true;
    std::string detail;

    const std::string base = "/tmp/bebsim_acceptance";
    fs::remove_all(base);

    const Scenario small = load_scenario(
        "", {"route.station_count=7", "route.total_length_km=8",
             "calendar.open=06:00", "calendar.close=11:00",
             "calendar.peak_windows=[[\"07:00\",\"09:00\"]]",
             "demand.target_daily_passengers=8000", "sim.bus_count=8",
             "sim.chargers.fast_count=2", "sim.chargers.slow_count=8",
             "sweep.bus_counts=[6,8]", "sweep.battery_sizes_kwh=[350]",
             "sweep.fast_charger_counts=[2]", "sweep.seeds=[1,2]"});

    const auto run_twice = [&](const char* tag, int (*cmd)(const Scenario&, const CommandOptions&),
                               const Scenario& scen) {
        CommandOptions a = opts;
        a.out_dir = base + "/" + tag + "_a";
        CommandOptions b = opts;
        b.out_dir = base + "/" + tag + "_b";
        if (cmd(scen, a) != 0 || cmd(scen, b) != 0) {
            ok = false;
            detail += std::string(" ") + tag + ":exit";
            return;
        }
        if (!identical_outputs(a.out_dir, b.out_dir)) {
            ok = false;
            detail += std::string(" ") + tag + ":bytes";
        }
    };

    run_twice("simulate", &cmd_simulate, s);
    run_twice("demand", &cmd_demand, s);
    run_twice("tco", &cmd_tco, s);
    run_twice("sweep", &cmd_sweep, small);
    report(9, ok,
           "determinism: simulate/demand/tco/sweep reruns are byte-identical"
           " (manifest excluded; it records wall-clock)" + detail);
}

// --- criterion 10: sampler statistics ---------------------------------------

void criterion_sampler_stats() {
    bool ok = true;
    std::string detail;
    const int n = 100000;

    // Alighting uniformity: chi-square over 26 destinations, alpha = 0.001.
    {
        SplitMix64 rng(1001);
        std::vector<int> counts(27, 0);
        for (int i = 0; i < n; ++i)
            ++counts[static_cast<std::size_t>(sample_alighting(0, Direction::Up, 27, rng))];
        const double expected = n / 26.0;
        double chi2 = 0.0;
        for (int st = 1; st <= 26; ++st)
            chi2 += (counts[static_cast<std::size_t>(st)] - expected) *
                    (counts[static_cast<std::size_t>(st)] - expected) / expected;
        detail += "alighting chi2(25)=" + fmt_fixed(chi2, 1);
        if (chi2 >= 52.620) ok = false;
    }

    // Direction frequencies vs the station formula, alpha = 0.001 per station.
    {
        double worst = 0.0;
        for (const int station : {1, 6, 13, 20, 25}) {
            const double p = direction_probability(station, 27);
            SplitMix64 rng = SplitMix64::substream(1002, static_cast<std::uint64_t>(station));
            int up = 0;
            for (int i = 0; i < n; ++i)
                if (sample_direction(p, rng) == Direction::Up) ++up;
            const double e_up = n * p;
            const double e_down = n * (1.0 - p);
            const double chi2 = (up - e_up) * (up - e_up) / e_up +
                                (n - up - e_down) * (n - up - e_down) / e_down;
            worst = std::max(worst, chi2);
            if (chi2 >= 10.828) ok = false;
        }
        detail += ", direction worst chi2(1)=" + fmt_fixed(worst, 2);
    }

    // Poisson moments within 3 sigma at lambda = 10.
    {
        SplitMix64 rng(1003);
        double sum = 0.0;
        double sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(poisson_sample(10.0, rng));
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = (sumsq - sum * sum / n) / (n - 1);
        detail += ", poisson mean=" + fmt_fixed(mean, 3) + " var=" + fmt_fixed(var, 3);
        if (std::abs(mean - 10.0) >= 3.0 * std::sqrt(10.0 / n)) ok = false;
        if (std::abs(var - 10.0) >= 3.0 * std::sqrt((10.0 + 200.0) / n)) ok = false;
    }
    report(10, ok, "sampler statistics at n=1e5, alpha=0.001: " + detail);
}

// --- criterion 11: TCO properties -------------------------------------------

void criterion_tco_properties() {
    SplitMix64 rng(0x7C0ULL);
    bool ok = true;
    std::string why;
    for (int trial = 0; trial < 500 && ok; ++trial) {
        BebCostModel m;
        m.fleet_size = 1 + static_cast<int>(rng.uniform_below(100));
        m.bus_cost_usd = 1e4 + rng.next_double() * 1e6;
        m.battery_kwh = 50.0 + rng.next_double() * 500.0;
        m.battery_cost_per_kwh = rng.next_double() * 300.0;
        m.battery_life_years = 1 + static_cast<int>(rng.uniform_below(12));
        m.battery_salvage_fraction = rng.next_double();
        m.study_life_years = 1 + static_cast<int>(rng.uniform_below(30));
        m.avg_daily_km = 50.0 + rng.next_double() * 500.0;
        m.maintenance_per_km = rng.next_double();
        m.electricity_price_per_kwh = rng.next_double();
        m.emission_cost_per_ton = rng.next_double() * 100.0;

        const TCOResult r = compute_tco(m, true);
        // Non-decreasing cumulative series.
        for (std::size_t y = 1; y < r.cumulative_with.size(); ++y) {
            if (r.cumulative_with[y] < r.cumulative_with[y - 1] - 1e-9 ||
                r.cumulative_without[y] < r.cumulative_without[y - 1] - 1e-9) {
                ok = false;
                why = "cumulative decrease";
            }
        }
        // Emission flag monotonicity.
        if (r.total_without > r.total_with + 1e-9) {
            ok = false;
            why = "emission flag";
        }
        // Degree-1 homogeneity in unit prices.
        BebCostModel d = m;
        d.bus_cost_usd *= 2.0;
        d.battery_cost_per_kwh *= 2.0;
        d.slow_charger.unit_cost_usd *= 2.0;
        d.slow_charger.install_cost_usd *= 2.0;
        d.fast_charger.unit_cost_usd *= 2.0;
        d.fast_charger.install_cost_usd *= 2.0;
        d.maintenance_per_km *= 2.0;
        d.electricity_price_per_kwh *= 2.0;
        d.emission_cost_per_ton *= 2.0;
        const TCOResult rd = compute_tco(d, true);
        if (std::abs(rd.total_with - 2.0 * r.total_with) > 1e-6 * std::max(1.0, r.total_with)) {
            ok = false;
            why = "homogeneity";
        }
        // Replacement count = floor((L-1)/battery_life).
        int replacements = 0;
        for (const CashflowYear& y : r.years)
            if (y.battery_replacement != 0.0) ++replacements;
        if (replacements != (m.study_life_years - 1) / m.battery_life_years) {
            ok = false;
            why = "replacement count";
        }
    }
    report(11, ok, "TCO properties over 500 random models (homogeneity, emission flag, "
                   "cumulative monotonicity, replacement schedule)" +
                       (ok ? std::string() : ": " + why));
}

// --- criterion 12: monotone recommendation ----------------------------------

void criterion_monotone_recommendation() {
    SplitMix64 rng(0x12ECULL);
    bool ok = true;
    for (int trial = 0; trial < 500 && ok; ++trial) {
        SweepReport report_cells;
        const int n = 2 + static_cast<int>(rng.uniform_below(12));
        for (int i = 0; i < n; ++i) {
            SweepCell c;
            c.bus_count = 40 + static_cast<int>(rng.uniform_below(40));
            c.battery_kwh = 300.0 + 50.0 * static_cast<double>(rng.uniform_below(4));
            c.fast_chargers = 2 + 2 * static_cast<int>(rng.uniform_below(7));
            c.mean_wait_min = rng.next_double() * 4.0;
            c.capital_usd = 1e6 * (10.0 + rng.next_double() * 10.0);
            c.strandings = rng.uniform_below(5) == 0 ? 1 : 0;
            report_cells.cells.push_back(c);
        }
        const double t1 = rng.next_double() * 3.0;
        const double t2 = t1 + rng.next_double() * 2.0;
        const Recommendation r1 = recommend(report_cells, t1);
        const Recommendation r2 = recommend(report_cells, t2);
        if (r1.feasible && (!r2.feasible || r2.capital_usd > r1.capital_usd + 1e-9)) ok = false;
    }
    report(12, ok, "monotone recommendation over 500 random reports: relaxing the wait "
                   "tolerance never raises the chosen capital cost");
}

} // namespace

int main() {
    std::printf("bebsim acceptance suite (Lahore corridor defaults)\n");
    const Scenario s = load_scenario("");

    criteria_sweep(s);
    criterion_demand(s);
    criterion_formulas();
    criteria_tco(s);
    criterion_random_invariants();
    criterion_determinism(s);
    criterion_sampler_stats();
    criterion_tco_properties();
    criterion_monotone_recommendation();

    std::printf("%s: %d/12 criteria passed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
                12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
