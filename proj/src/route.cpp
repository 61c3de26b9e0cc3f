#include "bebsim/route.hpp"

#include <cstdio>

#include "bebsim/errors.hpp"

namespace bebsim {

RouteModel build_route(const std::vector<std::pair<std::string, double>>& station_spec,
                       int depot_station) {
    if (station_spec.size() < 2)
        throw ValidationError("route: at least 2 stations required");
    if (station_spec.front().second != 0.0)
        throw ValidationError("route: first station must be at distance 0");

    RouteModel route;
    route.stations.reserve(station_spec.size());
    double prev = -1.0;
    int idx = 0;
    for (const auto& [name, dist] : station_spec) {
        if (dist <= prev)
            throw ValidationError("route: station distances must be strictly increasing (station " +
                                  std::to_string(idx) + ")");
        route.stations.push_back(Station{idx, name, dist});
        prev = dist;
        ++idx;
    }
    route.total_length_km = route.stations.back().distance_from_origin_km;
    if (depot_station < 0 || depot_station >= route.station_count())
        throw ValidationError("route: depot_station out of range");
    route.depot_station = depot_station;
    return route;
}

std::vector<std::pair<std::string, double>> uniform_station_spec(int station_count,
                                                                 double total_length_km) {
    if (station_count < 2)
        throw ValidationError("route: station_count must be >= 2");
    if (total_length_km <= 0.0)
        throw ValidationError("route: total_length_km must be positive");
    std::vector<std::pair<std::string, double>> spec;
    spec.reserve(static_cast<std::size_t>(station_count));
    for (int i = 0; i < station_count; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "S%02d", i);
        const double dist = total_length_km * static_cast<double>(i) /
                            static_cast<double>(station_count - 1);
        spec.emplace_back(name, dist);
    }
    spec.back().second = total_length_km; // avoid rounding residue at the far terminal
    return spec;
}

void validate_calendar(const ServiceCalendar& cal) {
    if (cal.open_minute < 0 || cal.close_minute > 24 * 60)
        throw ValidationError("calendar: operating hours must lie within one day");
    if (cal.open_minute >= cal.close_minute)
        throw ValidationError("calendar: open must precede close");
    int prev_end = cal.open_minute;
    for (const auto& w : cal.peak_windows) {
        if (w.start_minute >= w.end_minute)
            throw ValidationError("calendar: peak window start must precede end");
        if (w.start_minute < prev_end)
            throw ValidationError("calendar: peak windows must be ordered and disjoint");
        if (w.end_minute > cal.close_minute)
            throw ValidationError("calendar: peak window extends past close");
        prev_end = w.end_minute;
    }
}

ServicePeriod service_period(const ServiceCalendar& cal, int minute) {
    if (minute < cal.open_minute || minute >= cal.close_minute)
        return ServicePeriod::Closed;
    for (const auto& w : cal.peak_windows) {
        if (minute >= w.start_minute && minute < w.end_minute)
            return ServicePeriod::Peak;
    }
    return ServicePeriod::OffPeak;
}

OperatingMinutes operating_minutes(const ServiceCalendar& cal) {
    OperatingMinutes out;
    out.total = cal.close_minute - cal.open_minute;
    for (const auto& w : cal.peak_windows)
        out.peak += w.end_minute - w.start_minute;
    out.offpeak = out.total - out.peak;
    return out;
}

void validate_baseline(const BaselineDieselOps& ops) {
    if (ops.headway_peak_s > ops.headway_offpeak_s)
        throw ValidationError("baseline: peak headway must not exceed off-peak headway");
    if (ops.avg_speed_kmh <= 0.0 || ops.avg_speed_kmh > ops.max_speed_kmh)
        throw ValidationError("baseline: require 0 < avg_speed <= max_speed");
    if (ops.bus_capacity <= 0)
        throw ValidationError("baseline: bus_capacity must be positive");
}

double blended_half_headway_min(const BaselineDieselOps& ops, double peak_share) {
    const double peak_wait_min = ops.headway_peak_s / 120.0;
    const double offpeak_wait_min = ops.headway_offpeak_s / 120.0;
    return peak_share * peak_wait_min + (1.0 - peak_share) * offpeak_wait_min;
}

} // namespace bebsim
