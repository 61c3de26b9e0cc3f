#include "bebsim/tco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bebsim/errors.hpp"

namespace bebsim {

double GridEmissionTrajectory::factor_kg_per_kwh(int year) const {
    if (anchors.empty())
        throw ValidationError("tco: grid emission trajectory has no anchor points");
    if (year <= anchors.front().first) return anchors.front().second;
    if (year >= anchors.back().first) return anchors.back().second;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (year <= anchors[i].first) {
            const auto& [y0, f0] = anchors[i - 1];
            const auto& [y1, f1] = anchors[i];
            const double t = static_cast<double>(year - y0) / static_cast<double>(y1 - y0);
            return f0 + t * (f1 - f0);
        }
    }
    return anchors.back().second;
}

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0))
        throw ValidationError(std::string("tco: ") + field + " must be positive");
}

} // namespace

void validate_cost_model(const DieselCostModel& m) {
    if (m.fleet_size <= 0) throw ValidationError("tco: fleet_size must be positive");
    require_positive(m.bus_cost_usd, "bus_cost_usd");
    if (m.study_life_years < 1) throw ValidationError("tco: study_life_years must be >= 1");
    require_positive(m.mileage_km_per_l, "mileage_km_per_l");
    require_positive(m.avg_daily_km, "avg_daily_km");
    if (m.maintenance_per_km < 0 || m.fuel_price_per_l < 0 || m.emission_ton_per_l < 0 ||
        m.emission_cost_per_ton < 0)
        throw ValidationError("tco: unit prices must be non-negative");
    if (m.operating_days_per_year <= 0)
        throw ValidationError("tco: operating_days_per_year must be positive");
}

void validate_cost_model(const BebCostModel& m) {
    if (m.fleet_size <= 0) throw ValidationError("tco: fleet_size must be positive");
    require_positive(m.bus_cost_usd, "bus_cost_usd");
    if (m.study_life_years < 1) throw ValidationError("tco: study_life_years must be >= 1");
    require_positive(m.mileage_km_per_kwh, "mileage_km_per_kwh");
    require_positive(m.avg_daily_km, "avg_daily_km");
    require_positive(m.battery_kwh, "battery_kwh");
    if (m.battery_cost_per_kwh < 0)
        throw ValidationError("tco: battery_cost_per_kwh must be non-negative");
    if (m.battery_life_years < 1)
        throw ValidationError("tco: battery_life_years must be >= 1");
    if (m.battery_salvage_fraction < 0.0 || m.battery_salvage_fraction > 1.0)
        throw ValidationError("tco: battery_salvage_fraction must be in [0, 1]");
    if (m.slow_charger.count < 0 || m.fast_charger.count < 0)
        throw ValidationError("tco: charger counts must be >= 0");
    if (m.maintenance_per_km < 0 || m.electricity_price_per_kwh < 0 || m.emission_cost_per_ton < 0)
        throw ValidationError("tco: unit prices must be non-negative");
    if (m.operating_days_per_year <= 0)
        throw ValidationError("tco: operating_days_per_year must be positive");
}

double fuel_consumption(double distance_km, double mileage_km_per_l) {
    if (!(mileage_km_per_l > 0.0))
        throw ValidationError("tco: mileage_km_per_l must be positive");
    if (distance_km < 0.0)
        throw ValidationError("tco: distance_km must be >= 0");
    return distance_km / mileage_km_per_l;
}

double electricity_consumption(double distance_km, double mileage_km_per_kwh) {
    if (!(mileage_km_per_kwh > 0.0))
        throw ValidationError("tco: mileage_km_per_kwh must be positive");
    if (distance_km < 0.0)
        throw ValidationError("tco: distance_km must be >= 0");
    return distance_km / mileage_km_per_kwh;
}

double diesel_emissions(double liters, double factor_ton_per_l) {
    if (liters < 0.0 || factor_ton_per_l < 0.0)
        throw ValidationError("tco: diesel_emissions inputs must be >= 0");
    return liters * factor_ton_per_l;
}

double grid_emissions(double kwh, int year, const GridEmissionTrajectory& trajectory) {
    if (kwh < 0.0)
        throw ValidationError("tco: kwh must be >= 0");
    return kwh * trajectory.factor_kg_per_kwh(year) / 1000.0;
}

CashflowYear annual_cashflow(const DieselCostModel& m, int year_index) {
    if (year_index < 0 || year_index >= m.study_life_years)
        throw ValidationError("tco: year_index out of study life");
    CashflowYear y;
    if (year_index == 0)
        y.capital = m.fleet_size * m.bus_cost_usd;
    const double fleet_km_per_year =
        m.fleet_size * m.avg_daily_km * m.operating_days_per_year;
    const double liters_per_year = fuel_consumption(fleet_km_per_year, m.mileage_km_per_l);
    y.energy = liters_per_year * m.fuel_price_per_l;
    y.maintenance = fleet_km_per_year * m.maintenance_per_km;
    y.emission = diesel_emissions(liters_per_year, m.emission_ton_per_l) * m.emission_cost_per_ton;
    return y;
}

CashflowYear annual_cashflow(const BebCostModel& m, int year_index) {
    if (year_index < 0 || year_index >= m.study_life_years)
        throw ValidationError("tco: year_index out of study life");
    CashflowYear y;
    const double pack_cost = m.battery_kwh * m.battery_cost_per_kwh;
    if (year_index == 0) {
        y.capital = m.fleet_size * m.bus_cost_usd +
                    m.slow_charger.count * (m.slow_charger.unit_cost_usd + m.slow_charger.install_cost_usd) +
                    m.fast_charger.count * (m.fast_charger.unit_cost_usd + m.fast_charger.install_cost_usd) +
                    m.fleet_size * pack_cost; // initial packs priced as a separate line item
    }
    if (year_index > 0 && year_index % m.battery_life_years == 0)
        y.battery_replacement = m.fleet_size * pack_cost * (1.0 - m.battery_salvage_fraction);
    const double fleet_km_per_year =
        m.fleet_size * m.avg_daily_km * m.operating_days_per_year;
    const double kwh_per_year = electricity_consumption(fleet_km_per_year, m.mileage_km_per_kwh);
    y.energy = kwh_per_year * m.electricity_price_per_kwh;
    y.maintenance = fleet_km_per_year * m.maintenance_per_km;
    y.emission = grid_emissions(kwh_per_year, m.start_year + year_index, m.grid) *
                 m.emission_cost_per_ton;
    return y;
}

namespace {

template <typename Model>
TCOResult compute_tco_impl(const Model& m, bool include_emissions) {
    validate_cost_model(m);
    TCOResult r;
    r.emissions_included = include_emissions;
    r.years.reserve(static_cast<std::size_t>(m.study_life_years));
    double cum_with = 0.0;
    double cum_without = 0.0;
    for (int y = 0; y < m.study_life_years; ++y) {
        const CashflowYear cf = annual_cashflow(m, y);
        cum_with += cf.total(true);
        cum_without += cf.total(false);
        r.years.push_back(cf);
        r.cumulative_with.push_back(cum_with);
        r.cumulative_without.push_back(cum_without);
    }
    r.total_with = cum_with;
    r.total_without = cum_without;
    return r;
}

} // namespace

TCOResult compute_tco(const DieselCostModel& m, bool include_emissions) {
    return compute_tco_impl(m, include_emissions);
}

TCOResult compute_tco(const BebCostModel& m, bool include_emissions) {
    return compute_tco_impl(m, include_emissions);
}

Breakeven breakeven_year(const std::vector<double>& cum_a, const std::vector<double>& cum_b) {
    if (cum_a.size() != cum_b.size())
        throw ValidationError("tco: breakeven series must have equal length");
    Breakeven out;
    for (std::size_t i = 0; i < cum_a.size(); ++i) {
        if (cum_b[i] <= cum_a[i]) {
            out.crossed = true;
            out.year_index = static_cast<int>(i);
            if (i == 0) {
                out.fractional_year = 0.0;
            } else {
                // Linear interpolation of the gap (b - a) across the year.
                const double g0 = cum_b[i - 1] - cum_a[i - 1];
                const double g1 = cum_b[i] - cum_a[i];
                const double denom = g0 - g1;
                const double t = denom > 0.0 ? g0 / denom : 1.0;
                out.fractional_year = static_cast<double>(i - 1) + std::clamp(t, 0.0, 1.0);
            }
            return out;
        }
    }
    return out;
}

EmissionComparison emission_cost_comparison(const TCOResult& diesel, const TCOResult& beb) {
    EmissionComparison out;
    double cum_d = 0.0;
    for (const auto& y : diesel.years) {
        cum_d += y.emission;
        out.diesel_cumulative.push_back(cum_d);
    }
    double cum_b = 0.0;
    for (const auto& y : beb.years) {
        cum_b += y.emission;
        out.beb_cumulative.push_back(cum_b);
    }
    const double d = out.diesel_cumulative.empty() ? 0.0 : out.diesel_cumulative.back();
    const double b = out.beb_cumulative.empty() ? 0.0 : out.beb_cumulative.back();
    out.gap_usd = d - b;
    out.ratio = b > 0.0 ? d / b : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace bebsim
