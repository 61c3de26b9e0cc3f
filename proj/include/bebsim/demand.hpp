#pragma once

#include <cstdint>
#include <vector>

#include "bebsim/rng.hpp"
#include "bebsim/route.hpp"

namespace bebsim {

// Arrival intensities are per station per minute. The published per-minute
// rates and the published daily total are mutually inconsistent, so the rates
// act as relative intensities and a calibration scale maps their expectation
// onto target_daily_passengers (see calibrate_lambda).
struct DemandParams {
    double lambda_peak{10.0};
    double lambda_offpeak{3.0};
    long long target_daily_passengers{95000};
};

enum class Direction { Up, Down }; // Up = increasing station index

struct Passenger {
    std::int64_t id{};
    int arrival_minute{};
    int origin{};
    Direction direction{Direction::Up};
    int destination{};
    double board_minute{-1.0};  // assigned by the simulator
    double alight_minute{-1.0}; // assigned by the simulator
};

struct PassengerSet {
    // Ordered by (arrival_minute, origin, id); ids are dense from 0.
    std::vector<Passenger> passengers;
    std::uint64_t seed{};
    double calibration_scale{1.0};
    long long peak_count{};
    long long offpeak_count{};

    long long total() const { return static_cast<long long>(passengers.size()); }
    double peak_share() const {
        const long long n = total();
        return n == 0 ? 0.0 : static_cast<double>(peak_count) / static_cast<double>(n);
    }
};

std::uint64_t poisson_sample(double lambda, SplitMix64& rng);

// Probability that a passenger arriving at station_index heads Up:
// (S_n - S_i - 1) / (S_n - 1). Terminals force 1.0 and 0.0.
double direction_probability(int station_index, int station_count);

Direction sample_direction(double p_up, SplitMix64& rng);

// Uniform over the stations strictly beyond origin in the travel direction.
int sample_alighting(int origin, Direction direction, int station_count, SplitMix64& rng);

// Scale such that the expected daily total equals target_daily_passengers:
// target / (S_n * (peak_minutes * lambda_peak + offpeak_minutes * lambda_offpeak)).
double calibrate_lambda(const DemandParams& params, const ServiceCalendar& cal,
                        int station_count);

// One full day of passengers. Each (station, minute) cell draws its count
// from Poisson(scale * lambda(period)) on its own substream, then each
// passenger gets a direction (Bernoulli on direction_probability) and a
// uniform alighting station. Deterministic per (route, calendar, params, seed).
PassengerSet generate_day_demand(const RouteModel& route, const ServiceCalendar& cal,
                                 const DemandParams& params, std::uint64_t seed);

} // namespace bebsim
