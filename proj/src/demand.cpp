#include "bebsim/demand.hpp"

#include <string>

#include "bebsim/errors.hpp"

namespace bebsim {

std::uint64_t poisson_sample(double lambda, SplitMix64& rng) {
    if (lambda < 0.0)
        throw ValidationError("demand: lambda must be >= 0");
    return rng.poisson(lambda);
}

double direction_probability(int station_index, int station_count) {
    if (station_count < 2)
        throw ValidationError("demand: station_count must be >= 2");
    if (station_index < 0 || station_index >= station_count)
        throw ValidationError("demand: station_index " + std::to_string(station_index) +
                              " out of range [0, " + std::to_string(station_count) + ")");
    return static_cast<double>(station_count - station_index - 1) /
           static_cast<double>(station_count - 1);
}

Direction sample_direction(double p_up, SplitMix64& rng) {
    return rng.bernoulli(p_up) ? Direction::Up : Direction::Down;
}

int sample_alighting(int origin, Direction direction, int station_count, SplitMix64& rng) {
    if (origin < 0 || origin >= station_count)
        throw ValidationError("demand: origin out of range");
    if (direction == Direction::Up) {
        const int options = station_count - origin - 1;
        if (options <= 0)
            throw ValidationError("demand: no station beyond origin in direction Up");
        return origin + 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(options)));
    }
    const int options = origin;
    if (options <= 0)
        throw ValidationError("demand: no station beyond origin in direction Down");
    return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(options)));
}

double calibrate_lambda(const DemandParams& params, const ServiceCalendar& cal,
                        int station_count) {
    if (params.lambda_peak < params.lambda_offpeak || params.lambda_offpeak < 0.0)
        throw ValidationError("demand: require lambda_peak >= lambda_offpeak >= 0");
    if (params.target_daily_passengers < 0)
        throw ValidationError("demand: target_daily_passengers must be >= 0");
    const OperatingMinutes mins = operating_minutes(cal);
    const double raw = static_cast<double>(station_count) *
                       (mins.peak * params.lambda_peak + mins.offpeak * params.lambda_offpeak);
    if (raw <= 0.0)
        throw ValidationError("demand: expected raw arrival total is zero; cannot calibrate");
    return static_cast<double>(params.target_daily_passengers) / raw;
}

PassengerSet generate_day_demand(const RouteModel& route, const ServiceCalendar& cal,
                                 const DemandParams& params, std::uint64_t seed) {
    validate_calendar(cal);
    const int n = route.station_count();

    PassengerSet set;
    set.seed = seed;
    set.calibration_scale = calibrate_lambda(params, cal, n);

    std::int64_t next_id = 0;
    for (int minute = cal.open_minute; minute < cal.close_minute; ++minute) {
        const ServicePeriod period = service_period(cal, minute);
        const bool peak = period == ServicePeriod::Peak;
        const double lambda =
            set.calibration_scale * (peak ? params.lambda_peak : params.lambda_offpeak);
        for (int station = 0; station < n; ++station) {
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(station),
                                                   static_cast<std::uint64_t>(minute));
            const std::uint64_t count = rng.poisson(lambda);
            for (std::uint64_t k = 0; k < count; ++k) {
                Passenger p;
                p.id = next_id++;
                p.arrival_minute = minute;
                p.origin = station;
                p.direction = sample_direction(direction_probability(station, n), rng);
                p.destination = sample_alighting(station, p.direction, n, rng);
                set.passengers.push_back(p);
                if (peak)
                    ++set.peak_count;
                else
                    ++set.offpeak_count;
            }
        }
    }
    return set;
}

} // namespace bebsim
