#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace bebsim {

struct DieselCostModel {
    int fleet_size{58};
    double bus_cost_usd{350000.0};
    int study_life_years{12};
    double mileage_km_per_l{2.0};
    double avg_daily_km{415.0};
    double maintenance_per_km{0.3921};
    double fuel_price_per_l{0.7657};
    double emission_ton_per_l{0.002910};
    double emission_cost_per_ton{50.0};
    int operating_days_per_year{365};
};

struct ChargerCost {
    int count{};
    double unit_cost_usd{};
    double install_cost_usd{};
};

// Grid carbon intensity anchors (year, kgCO2e/kWh); linear interpolation
// between anchors, clamped outside.
struct GridEmissionTrajectory {
    std::vector<std::pair<int, double>> anchors{{2020, 0.416}, {2025, 0.351}, {2030, 0.239}};
    double factor_kg_per_kwh(int year) const;
};

struct BebCostModel {
    int fleet_size{64};
    double bus_cost_usd{532000.0};
    ChargerCost slow_charger{58, 50000.0, 17050.0};
    ChargerCost fast_charger{10, 495636.0, 202811.0};
    double battery_kwh{350.0};
    double battery_cost_per_kwh{137.0};
    int battery_life_years{6};
    double battery_salvage_fraction{0.30};
    int study_life_years{12};
    double mileage_km_per_kwh{1.88};
    double avg_daily_km{374.0};
    double maintenance_per_km{0.206};
    double emission_cost_per_ton{50.0};
    double electricity_price_per_kwh{0.1143};
    int operating_days_per_year{365};
    GridEmissionTrajectory grid;
    int start_year{2022}; // calendar year of study year 0
};

void validate_cost_model(const DieselCostModel& m);
void validate_cost_model(const BebCostModel& m);

struct CashflowYear {
    double capital{};
    double energy{};
    double maintenance{};
    double battery_replacement{}; // net of salvage credit
    double emission{};

    double total(bool with_emissions) const {
        return capital + energy + maintenance + battery_replacement +
               (with_emissions ? emission : 0.0);
    }
};

struct TCOResult {
    std::vector<CashflowYear> years;
    std::vector<double> cumulative_with;    // emission cost included
    std::vector<double> cumulative_without; // emission cost excluded
    double total_with{};
    double total_without{};
    bool emissions_included{true}; // which total `total()` reports
    double total() const { return emissions_included ? total_with : total_without; }
};

// FC = distance / mileage (liters).
double fuel_consumption(double distance_km, double mileage_km_per_l);

// EC = distance / mileage (kWh).
double electricity_consumption(double distance_km, double mileage_km_per_kwh);

// Tailpipe CO2e from burned fuel (tons).
double diesel_emissions(double liters, double factor_ton_per_l);

// CO2e attributed to grid electricity in a given calendar year (tons).
double grid_emissions(double kwh, int year, const GridEmissionTrajectory& trajectory);

// One study year of costs. Year 0 carries capital (buses; plus chargers,
// installations and initial battery packs for BEB). Battery replacement is
// charged, net of salvage, at every multiple of battery_life_years strictly
// inside the study.
CashflowYear annual_cashflow(const DieselCostModel& m, int year_index);
CashflowYear annual_cashflow(const BebCostModel& m, int year_index);

TCOResult compute_tco(const DieselCostModel& m, bool include_emissions = true);
TCOResult compute_tco(const BebCostModel& m, bool include_emissions = true);

struct Breakeven {
    bool crossed{false};
    int year_index{-1};          // first index where cum_b <= cum_a
    double fractional_year{-1.0}; // linear sub-year interpolation
};

// First year index at which series b falls to or below series a.
Breakeven breakeven_year(const std::vector<double>& cum_a, const std::vector<double>& cum_b);

struct EmissionComparison {
    std::vector<double> diesel_cumulative;
    std::vector<double> beb_cumulative;
    double gap_usd{};   // diesel - beb at study end
    double ratio{};     // diesel / beb at study end (inf if beb is 0)
};

EmissionComparison emission_cost_comparison(const TCOResult& diesel, const TCOResult& beb);

} // namespace bebsim
