#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bebsim {

enum class ServicePeriod { Peak, OffPeak, Closed };

struct Station {
    int index{};
    std::string name;
    double distance_from_origin_km{};
};

// A linear bi-directional corridor. Terminals are always the first and last
// station; the depot hosts the slow (overnight) chargers.
struct RouteModel {
    std::vector<Station> stations;
    double total_length_km{};
    int depot_station{0};

    int station_count() const { return static_cast<int>(stations.size()); }
    int first_terminal() const { return 0; }
    int last_terminal() const { return station_count() - 1; }
    bool is_terminal(int idx) const { return idx == first_terminal() || idx == last_terminal(); }
    // Length of the segment between adjacent stations i and i+1.
    double segment_km(int i) const {
        return stations[static_cast<std::size_t>(i) + 1].distance_from_origin_km -
               stations[static_cast<std::size_t>(i)].distance_from_origin_km;
    }
};

RouteModel build_route(const std::vector<std::pair<std::string, double>>& station_spec,
                       int depot_station = 0);

// Evenly spaced station spec, used when a scenario gives only count and length.
std::vector<std::pair<std::string, double>> uniform_station_spec(int station_count,
                                                                 double total_length_km);

struct PeakWindow {
    int start_minute{};
    int end_minute{}; // exclusive
};

struct ServiceCalendar {
    int open_minute{};
    int close_minute{};
    std::vector<PeakWindow> peak_windows; // disjoint, ordered, inside [open, close)
};

void validate_calendar(const ServiceCalendar& cal);

// Peak iff the minute falls in a peak window, OffPeak for other operating
// minutes, Closed outside [open, close).
ServicePeriod service_period(const ServiceCalendar& cal, int minute);

struct OperatingMinutes {
    int total{};
    int peak{};
    int offpeak{};
};

OperatingMinutes operating_minutes(const ServiceCalendar& cal);

// Reference figures for the incumbent diesel operation; used for waiting-time
// comparison and for the sweep's default tolerance.
struct BaselineDieselOps {
    int fleet_in_circuit{58};
    int headway_peak_s{135};
    int headway_offpeak_s{180};
    double avg_speed_kmh{40.0};
    double max_speed_kmh{55.0};
    int bus_capacity{160};
    double avg_daily_distance_km{313.2};
};

void validate_baseline(const BaselineDieselOps& ops);

// Expected wait under uniform arrivals: half the headway, blended by the
// peak/off-peak passenger share. Returns minutes.
double blended_half_headway_min(const BaselineDieselOps& ops, double peak_share);

} // namespace bebsim
