#include "bebsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "bebsim/errors.hpp"

namespace bebsim {

void validate_config(const SimConfig& config) {
    if (config.bus_count < 1)
        throw ValidationError("sim: bus_count must be >= 1");
    const BusSpec& b = config.bus;
    if (b.passenger_capacity <= 0)
        throw ValidationError("sim: passenger_capacity must be positive");
    if (b.battery_kwh <= 0.0)
        throw ValidationError("sim: battery_kwh must be positive");
    if (!(b.usable_fraction > 0.0 && b.usable_fraction <= 1.0))
        throw ValidationError("sim: usable_fraction must be in (0, 1]");
    if (b.energy_per_km <= 0.0)
        throw ValidationError("sim: energy_per_km must be positive");
    if (b.avg_speed_kmh <= 0.0)
        throw ValidationError("sim: avg_speed_kmh must be positive");
    if (b.dwell_s < 0.0)
        throw ValidationError("sim: dwell_s must be >= 0");
    if (config.chargers.fast_count < 0 || config.chargers.slow_count < 0)
        throw ValidationError("sim: charger counts must be >= 0");
    if (config.chargers.fast_kw <= 0.0 || config.chargers.slow_kw <= 0.0)
        throw ValidationError("sim: charger ratings must be positive");
    if (!(config.charge_start_threshold >= 0.0 &&
          config.charge_start_threshold < config.charge_stop_threshold &&
          config.charge_stop_threshold <= 1.0))
        throw ValidationError("sim: require 0 <= charge_start_threshold < charge_stop_threshold <= 1");
    if (config.headway_peak_s <= 0 || config.headway_offpeak_s <= 0)
        throw ValidationError("sim: headways must be positive");
    if (config.headway_peak_s > config.headway_offpeak_s)
        throw ValidationError("sim: peak headway must not exceed off-peak headway");
    if (config.turnaround_s < 0)
        throw ValidationError("sim: turnaround_s must be >= 0");
    if (config.aux_kw < 0.0)
        throw ValidationError("sim: aux_kw must be >= 0");
    if (!(config.charge_efficiency > 0.0 && config.charge_efficiency <= 1.0))
        throw ValidationError("sim: charge_efficiency must be in (0, 1]");
}

DispatchDecision dispatch_policy(double now_s, double next_due_s, int headway_s,
                                 bool ready_bus_available) {
    if (next_due_s > now_s) return DispatchDecision::Wait;
    if (ready_bus_available) return DispatchDecision::Dispatch;
    if (now_s - next_due_s >= static_cast<double>(headway_s)) return DispatchDecision::SlotLost;
    return DispatchDecision::Wait; // slot stays pending; a bus may free up shortly
}

ChargeAction charging_policy(double soc_kwh, double usable_kwh, double start_threshold,
                             double stop_threshold, bool currently_charging,
                             bool fast_charger_free, bool overnight) {
    const double stop_target = overnight ? usable_kwh : stop_threshold * usable_kwh;
    if (currently_charging)
        return soc_kwh >= stop_target - 1e-12 ? ChargeAction::Release : ChargeAction::Continue;
    if (overnight)
        return soc_kwh >= usable_kwh - 1e-12 ? ChargeAction::Release : ChargeAction::StartSlow;
    if (soc_kwh < start_threshold * usable_kwh)
        return fast_charger_free ? ChargeAction::StartFast : ChargeAction::QueueFast;
    return ChargeAction::Release; // above threshold: no charger held
}

const std::vector<double>& grid_load_profile(const SimResult& result) {
    return result.grid_load_kwh;
}

FleetComparison fleet_comparison(const SimResult& result, const BaselineDieselOps& baseline) {
    validate_baseline(baseline);
    FleetComparison fc;
    fc.beb_avg_wait_min = result.avg_wait_min;
    fc.baseline_wait_min = blended_half_headway_min(baseline, result.peak_passenger_share);
    fc.wait_delta_fraction = fc.baseline_wait_min > 0.0
        ? (fc.beb_avg_wait_min - fc.baseline_wait_min) / fc.baseline_wait_min
        : 0.0;
    fc.beb_total_distance_km = result.total_distance_km;
    fc.baseline_total_distance_km =
        baseline.fleet_in_circuit * baseline.avg_daily_distance_km;
    fc.passengers_served = result.passengers_served;
    return fc;
}

namespace {

constexpr int kBaseHorizonMinutes = 1440;
constexpr int kMaxHorizonMinutes = 2880;
constexpr int kHistogramBins = 121; // 1-minute bins; last bin is overflow
constexpr double kMinDispatchSpacingS = 90.0; // platform re-occupancy gap
constexpr double kMaxSlotBacklogHeadways = 2.0; // older slots are dropped service

enum class BusMode {
    Idle,          // at a terminal, dispatchable after layover
    InService,     // running a revenue leg
    Deadhead,      // returning empty to the depot after close
    Charging,      // on a terminal fast charger
    Queued,        // waiting for a terminal fast charger
    DepotQueued,   // waiting for a depot slow charger
    DepotCharging, // on a depot slow charger
    Parked,        // done for the day
    Stranded,      // battery exhausted mid-route
};

struct EngineBus {
    int id{};
    BusMode mode{BusMode::Idle};
    Direction dir{Direction::Up};
    int at_station{0};   // valid while stopped/idle
    int next_station{0}; // valid while moving
    double dist_to_next_km{0.0};
    double dwell_remaining_s{0.0};
    double ready_at_s{0.0};
    int terminal{0}; // terminal (or depot) the bus is standing at
    double start_debit_s{0.0};  // movement budget consumed by a mid-minute dispatch
    double claim_time_min{0.0};  // when the bus plugged in or joined the queue
    double initial_soc_kwh{0.0};
    double traction_kwh{0.0};
    double charged_kwh{0.0};
    double aux_kwh{0.0};
    double odometer_km{0.0};
    int onboard{0};
    std::vector<std::vector<int>> dest_buckets;

    double soc() const { return initial_soc_kwh + charged_kwh - traction_kwh - aux_kwh; }
};

struct StationQueue {
    std::vector<int> pax; // indices in arrival order
    std::size_t head{0};
};

class Engine {
public:
    Engine(const RouteModel& route, const ServiceCalendar& cal, const SimConfig& config,
           const PassengerSet& demand)
        : route_(route), cal_(cal), cfg_(config), pax_(demand.passengers) {
        usable_ = cfg_.bus.usable_kwh();
        start_soc_threshold_ = cfg_.charge_start_threshold * usable_;
        n_stations_ = route_.station_count();
        terminals_[0] = route_.first_terminal();
        terminals_[1] = route_.last_terminal();
        // Split the fast-charger pool across the terminals; the odd unit goes
        // to the terminal nearer the depot.
        const int depot_side = route_.depot_station <= n_stations_ / 2 ? 0 : 1;
        fast_units_[depot_side].assign((cfg_.chargers.fast_count + 1) / 2, -1);
        fast_units_[1 - depot_side].assign(cfg_.chargers.fast_count / 2, -1);

        // Arrival counts are per minute; actual arrival instants are uniform
        // within the minute (the conditional law of a Poisson process given
        // its per-minute counts). Offsets derive from the demand seed and the
        // passenger id, so imported passenger files replay identically.
        arrival_instant_.resize(pax_.size());
        for (std::size_t i = 0; i < pax_.size(); ++i) {
            SplitMix64 rng = SplitMix64::substream(
                demand.seed, 0xA221, static_cast<std::uint64_t>(pax_[i].id));
            arrival_instant_[i] = pax_[i].arrival_minute + rng.next_double();
        }

        up_queues_.resize(static_cast<std::size_t>(n_stations_));
        down_queues_.resize(static_cast<std::size_t>(n_stations_));
        for (int i = 0; i < static_cast<int>(pax_.size()); ++i) {
            const Passenger& p = pax_[i];
            auto& q = p.direction == Direction::Up ? up_queues_[static_cast<std::size_t>(p.origin)]
                                                   : down_queues_[static_cast<std::size_t>(p.origin)];
            q.pax.push_back(i);
        }
        for (auto* queues : {&up_queues_, &down_queues_}) {
            for (StationQueue& q : *queues) {
                std::stable_sort(q.pax.begin(), q.pax.end(), [this](int a, int b) {
                    return arrival_instant_[static_cast<std::size_t>(a)] <
                           arrival_instant_[static_cast<std::size_t>(b)];
                });
            }
        }
        evacuated_.assign(pax_.size(), 0);

        buses_.resize(static_cast<std::size_t>(cfg_.bus_count));
        for (int b = 0; b < cfg_.bus_count; ++b) {
            EngineBus& bus = buses_[static_cast<std::size_t>(b)];
            bus.id = b;
            bus.mode = BusMode::Idle;
            bus.terminal = terminals_[b % 2]; // stage half the fleet at each end
            bus.at_station = bus.terminal;
            bus.ready_at_s = cal_.open_minute * 60.0;
            bus.initial_soc_kwh = usable_; // overnight charge tops the fleet up
            bus.dest_buckets.resize(static_cast<std::size_t>(n_stations_));
        }
        next_due_s_[0] = next_due_s_[1] = cal_.open_minute * 60.0;
        last_dispatch_s_[0] = last_dispatch_s_[1] = -1e18;
        result_.grid_load_kwh.assign(kBaseHorizonMinutes, 0.0);
        result_.min_soc_kwh = usable_;
        result_.max_soc_kwh = usable_;
    }

    SimResult run() {
        int horizon = kBaseHorizonMinutes;
        for (int m = 0; m < horizon; ++m) {
            step_minute(m);
            if (m == horizon - 1 && onboard_total() > 0 && horizon < kMaxHorizonMinutes) {
                ++horizon;
                result_.grid_load_kwh.push_back(0.0);
            }
        }
        // Safety valve: if passengers are still aboard at the hard cap,
        // classify them as undelivered so conservation holds.
        for (EngineBus& bus : buses_) evacuate(bus);
        finalize(horizon);
        return std::move(result_);
    }

private:
    void step_minute(int m) {
        const double ts = m * 60.0;
        const ServicePeriod period = service_period(cal_, m);
        const bool operating = period != ServicePeriod::Closed;

        deliver_fast_charge(m);
        deliver_slow_charge(m);
        if (operating) run_dispatch(ts, period);
        for (EngineBus& bus : buses_) {
            if (bus.mode == BusMode::InService || bus.mode == BusMode::Deadhead)
                move_bus(bus, m);
        }
        if (!operating && m >= cal_.close_minute) {
            for (EngineBus& bus : buses_)
                if (bus.mode == BusMode::Idle) after_close_policy(bus, m);
        }
        apply_aux_and_track();
    }

    // --- charging ---------------------------------------------------------

    // Each fast-charger unit runs in continuous time. The tick at minute m
    // settles the window [m-1, m): a unit charges its bus, may finish it
    // mid-window, and hands the rest of the window to the next bus in line.
    void deliver_fast_charge(int m) {
        if (m == 0) return;
        const double stop_target = cfg_.charge_stop_threshold * usable_;
        const double rate = cfg_.chargers.fast_kw / 60.0 * cfg_.charge_efficiency; // kWh per min
        const double w0 = m - 1.0;
        const double w1 = static_cast<double>(m);
        for (int t = 0; t < 2; ++t) {
            for (int& slot : fast_units_[t]) {
                double cursor = w0;
                while (cursor < w1 - 1e-12) {
                    if (slot < 0) {
                        if (fast_queue_[t].empty()) break;
                        slot = fast_queue_[t].front();
                        fast_queue_[t].pop_front();
                        EngineBus& next = buses_[static_cast<std::size_t>(slot)];
                        next.mode = BusMode::Charging;
                        next.claim_time_min = std::max(next.claim_time_min, cursor);
                    }
                    EngineBus& bus = buses_[static_cast<std::size_t>(slot)];
                    const double start = std::max(cursor, bus.claim_time_min);
                    if (start >= w1 - 1e-12) break;
                    const double headroom = stop_target - bus.soc();
                    const double time_need = headroom / rate;
                    const double time_avail = w1 - start;
                    double gain;
                    if (time_need <= time_avail + 1e-12) {
                        gain = std::max(0.0, headroom);
                        cursor = start + std::max(0.0, time_need);
                        bus.mode = BusMode::Idle;
                        bus.ready_at_s = std::max(bus.ready_at_s, cursor * 60.0);
                        slot = -1;
                    } else {
                        gain = rate * time_avail;
                        cursor = w1;
                    }
                    bus.charged_kwh += gain;
                    const double grid = gain / cfg_.charge_efficiency;
                    result_.grid_load_kwh[static_cast<std::size_t>(m - 1)] += grid;
                    result_.fast_charging_grid_kwh += grid;
                }
            }
        }
    }

    void deliver_slow_charge(int m) {
        const double rate_battery = cfg_.chargers.slow_kw / 60.0 * cfg_.charge_efficiency;
        for (std::size_t i = 0; i < slow_active_.size();) {
            EngineBus& bus = buses_[static_cast<std::size_t>(slow_active_[i])];
            const double headroom = usable_ - bus.soc();
            if (headroom <= 1e-12) {
                bus.mode = BusMode::Parked;
                slow_active_.erase(slow_active_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            const double gain = std::min(rate_battery, headroom);
            bus.charged_kwh += gain;
            const double grid = gain / cfg_.charge_efficiency;
            result_.grid_load_kwh[static_cast<std::size_t>(m)] += grid;
            result_.slow_charging_grid_kwh += grid;
            if (usable_ - bus.soc() <= 1e-12) {
                bus.mode = BusMode::Parked;
                slow_active_.erase(slow_active_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            ++i;
        }
        while (static_cast<int>(slow_active_.size()) < cfg_.chargers.slow_count &&
               !slow_queue_.empty()) {
            const int id = slow_queue_.front();
            slow_queue_.pop_front();
            buses_[static_cast<std::size_t>(id)].mode = BusMode::DepotCharging;
            slow_active_.push_back(id);
        }
    }

    // `must` marks a bus below the start threshold: it has to wait for a
    // charger no matter how long the line is. Top-ups are skipped once the
    // queue is already one full rotation deep; the bus stays in service on
    // battery instead of idling in line.
    void claim_fast_or_queue(EngineBus& bus, int terminal_slot, double t_min, bool must) {
        bus.claim_time_min = t_min;
        for (int& slot : fast_units_[terminal_slot]) {
            if (slot < 0 && fast_queue_[terminal_slot].empty()) {
                slot = bus.id;
                bus.mode = BusMode::Charging;
                return;
            }
        }
        if (!fast_units_[terminal_slot].empty() &&
            (must || static_cast<int>(fast_queue_[terminal_slot].size()) <
                         static_cast<int>(fast_units_[terminal_slot].size()))) {
            bus.mode = BusMode::Queued;
            fast_queue_[terminal_slot].push_back(bus.id);
        }
        // Otherwise stay idle. Below the start threshold with no chargers at
        // this terminal the bus is dispatch-ineligible and effectively parks,
        // which surfaces through headway violations.
    }

    // --- dispatch ---------------------------------------------------------

    int dispatch_headway(int m, ServicePeriod period) const {
        int headway =
            period == ServicePeriod::Peak ? cfg_.headway_peak_s : cfg_.headway_offpeak_s;
        if (cfg_.dispatch_lead_s > 0 &&
            service_period(cal_, m + cfg_.dispatch_lead_s / 60) == ServicePeriod::Peak)
            headway = std::min(headway, cfg_.headway_peak_s);
        return headway;
    }

    // Departures fire at their exact due instants inside the minute. A slot
    // whose due point passed with no bus available stays pending and fires
    // as soon as one frees up (with a minimum platform re-occupancy spacing);
    // every starved minute increments the violation counter.
    void run_dispatch(double ts, ServicePeriod period) {
        const int headway = dispatch_headway(static_cast<int>(ts / 60.0), period);
        for (int t = 0; t < 2; ++t) {
            for (;;) {
                const double due = next_due_s_[t];
                if (due >= ts + 60.0) break; // nothing due this minute
                const double instant =
                    std::max({due, ts, last_dispatch_s_[t] + kMinDispatchSpacingS});
                if (instant >= ts + 60.0) break; // spacing pushes into the next minute
                const int candidate = pick_ready_bus(terminals_[t], instant);
                const DispatchDecision d =
                    dispatch_policy(instant, due, headway, candidate >= 0);
                if (d == DispatchDecision::Dispatch) {
                    dispatch_bus(buses_[static_cast<std::size_t>(candidate)], t, instant);
                    last_dispatch_s_[t] = instant;
                    next_due_s_[t] = due + headway;
                } else {
                    if (d == DispatchDecision::SlotLost) {
                        ++result_.headway_violations;
                        // Slots don't pile up beyond a couple of headways;
                        // anything older is dropped service, not a backlog
                        // to burst through later.
                        if (instant - due >= kMaxSlotBacklogHeadways * headway)
                            next_due_s_[t] = due + headway;
                        else
                            break;
                    } else {
                        break;
                    }
                }
            }
        }
    }

    int pick_ready_bus(int terminal, double ts) const {
        int best = -1;
        double best_soc = -1.0;
        for (const EngineBus& bus : buses_) {
            if (bus.mode != BusMode::Idle || bus.terminal != terminal) continue;
            if (bus.ready_at_s > ts) continue;
            const double s = bus.soc();
            if (s < start_soc_threshold_ - 1e-12) continue;
            if (s > best_soc + 1e-12) {
                best = bus.id;
                best_soc = s;
            }
        }
        return best;
    }

    void dispatch_bus(EngineBus& bus, int terminal_slot, double instant_s) {
        bus.mode = BusMode::InService;
        bus.dir = terminal_slot == 0 ? Direction::Up : Direction::Down;
        bus.at_station = terminals_[terminal_slot];
        bus.start_debit_s = instant_s - std::floor(instant_s / 60.0) * 60.0;
        const double t_min = instant_s / 60.0;
        board(bus, bus.at_station, t_min);
        bus.dwell_remaining_s = cfg_.bus.dwell_s;
        bus.next_station = bus.dir == Direction::Up ? bus.at_station + 1 : bus.at_station - 1;
        bus.dist_to_next_km = segment_between(bus.at_station, bus.next_station);
    }

    // --- movement ---------------------------------------------------------

    double segment_between(int a, int b) const {
        return std::abs(route_.stations[static_cast<std::size_t>(b)].distance_from_origin_km -
                        route_.stations[static_cast<std::size_t>(a)].distance_from_origin_km);
    }

    void move_bus(EngineBus& bus, int m) {
        double budget_s = 60.0 - bus.start_debit_s;
        bus.start_debit_s = 0.0;
        const double speed_km_s = cfg_.bus.avg_speed_kmh / 3600.0;
        while (budget_s > 1e-9) {
            if (bus.dwell_remaining_s > 0.0) {
                const double use = std::min(bus.dwell_remaining_s, budget_s);
                bus.dwell_remaining_s -= use;
                budget_s -= use;
                continue;
            }
            const double t_need_s = bus.dist_to_next_km / speed_km_s;
            const double drive_s = std::min(t_need_s, budget_s);
            double dist = speed_km_s * drive_s;
            double energy = dist * cfg_.bus.energy_per_km;
            const double avail = bus.soc();
            if (energy > avail + 1e-12) {
                // Not enough charge to complete the planned advance: creep as
                // far as the battery allows, then strand.
                const double feasible = std::max(0.0, avail / cfg_.bus.energy_per_km);
                bus.traction_kwh += feasible * cfg_.bus.energy_per_km;
                bus.odometer_km += feasible;
                bus.dist_to_next_km -= feasible;
                strand(bus, m + (60.0 - budget_s) / 60.0);
                return;
            }
            bus.traction_kwh += energy;
            bus.odometer_km += dist;
            bus.dist_to_next_km -= dist;
            budget_s -= drive_s;
            if (bus.dist_to_next_km <= 1e-9) {
                const double t_min = m + (60.0 - budget_s) / 60.0;
                arrive_at_station(bus, t_min);
                if (bus.mode != BusMode::InService && bus.mode != BusMode::Deadhead)
                    return; // leg finished (idle/charging/depot)
            }
        }
    }

    void arrive_at_station(EngineBus& bus, double t_min) {
        const int st = bus.next_station;
        bus.at_station = st;
        bus.dist_to_next_km = 0.0;
        if (bus.mode == BusMode::Deadhead) {
            if (st == route_.depot_station) {
                join_depot(bus);
                return;
            }
            bus.next_station = bus.dir == Direction::Up ? st + 1 : st - 1;
            bus.dist_to_next_km = segment_between(st, bus.next_station);
            return; // no stops while deadheading
        }
        alight(bus, st, t_min);
        const bool end_of_leg = (bus.dir == Direction::Up && st == route_.last_terminal()) ||
                                (bus.dir == Direction::Down && st == route_.first_terminal());
        if (end_of_leg) {
            finish_leg(bus, st, t_min);
            return;
        }
        board(bus, st, t_min);
        bus.dwell_remaining_s = cfg_.bus.dwell_s;
        bus.next_station = bus.dir == Direction::Up ? st + 1 : st - 1;
        bus.dist_to_next_km = segment_between(st, bus.next_station);
    }

    void finish_leg(EngineBus& bus, int terminal, double t_min) {
        bus.mode = BusMode::Idle;
        bus.terminal = terminal;
        bus.ready_at_s = t_min * 60.0 + cfg_.turnaround_s;
        const int slot = terminal == terminals_[0] ? 0 : 1;
        const double claim_threshold = cfg_.charge_trigger == ChargeTrigger::Arrival
                                           ? cfg_.charge_stop_threshold
                                           : cfg_.charge_start_threshold;
        const ChargeAction action =
            charging_policy(bus.soc(), usable_, claim_threshold, cfg_.charge_stop_threshold,
                            false, true, false);
        if (action == ChargeAction::StartFast || action == ChargeAction::QueueFast)
            claim_fast_or_queue(bus, slot, t_min, bus.soc() < start_soc_threshold_ - 1e-12);
    }

    void alight(EngineBus& bus, int st, double t_min) {
        auto& bucket = bus.dest_buckets[static_cast<std::size_t>(st)];
        for (const int idx : bucket) {
            pax_[static_cast<std::size_t>(idx)].alight_minute = t_min;
            ++alighted_;
        }
        bus.onboard -= static_cast<int>(bucket.size());
        bucket.clear();
    }

    void board(EngineBus& bus, int st, double t_min) {
        StationQueue& q = bus.dir == Direction::Up ? up_queues_[static_cast<std::size_t>(st)]
                                                   : down_queues_[static_cast<std::size_t>(st)];
        while (q.head < q.pax.size() && bus.onboard < cfg_.bus.passenger_capacity) {
            const int idx = q.pax[q.head];
            if (arrival_instant_[static_cast<std::size_t>(idx)] > t_min) break;
            Passenger& p = pax_[static_cast<std::size_t>(idx)];
            p.board_minute = t_min;
            bus.dest_buckets[static_cast<std::size_t>(p.destination)].push_back(idx);
            ++bus.onboard;
            ++boarded_;
            ++q.head;
        }
        result_.max_onboard = std::max(result_.max_onboard, bus.onboard);
    }

    void strand(EngineBus& bus, double t_min) {
        double pos = route_.stations[static_cast<std::size_t>(bus.next_station)].distance_from_origin_km;
        pos += bus.dir == Direction::Up ? -bus.dist_to_next_km : bus.dist_to_next_km;
        result_.strandings.push_back(StrandingEvent{bus.id, t_min, pos, bus.onboard});
        evacuate(bus);
        bus.mode = BusMode::Stranded;
    }

    // Passengers aboard a dead bus abandon it; they count as unserved.
    void evacuate(EngineBus& bus) {
        for (auto& bucket : bus.dest_buckets) {
            for (const int idx : bucket) {
                evacuated_[static_cast<std::size_t>(idx)] = 1;
                ++evacuated_count_;
            }
            bucket.clear();
        }
        bus.onboard = 0;
    }

    // --- after close ------------------------------------------------------

    void after_close_policy(EngineBus& bus, int m) {
        if (bus.at_station == route_.depot_station) {
            join_depot(bus);
            return;
        }
        const double dist = segment_distance_to_depot(bus.at_station);
        const double hours = dist / cfg_.bus.avg_speed_kmh;
        const double need = (dist * cfg_.bus.energy_per_km + cfg_.aux_kw * hours) * 1.05;
        if (bus.soc() >= need) {
            bus.mode = BusMode::Deadhead;
            bus.dir = route_.depot_station > bus.at_station ? Direction::Up : Direction::Down;
            bus.next_station = bus.dir == Direction::Up ? bus.at_station + 1 : bus.at_station - 1;
            bus.dist_to_next_km = segment_between(bus.at_station, bus.next_station);
            bus.dwell_remaining_s = 0.0;
        } else {
            claim_fast_or_queue(bus, bus.terminal == terminals_[0] ? 0 : 1,
                                static_cast<double>(m), true);
        }
    }

    double segment_distance_to_depot(int st) const {
        return std::abs(route_.stations[static_cast<std::size_t>(st)].distance_from_origin_km -
                        route_.stations[static_cast<std::size_t>(route_.depot_station)]
                            .distance_from_origin_km);
    }

    void join_depot(EngineBus& bus) {
        bus.terminal = route_.depot_station;
        bus.at_station = route_.depot_station;
        if (cfg_.chargers.slow_count == 0 || usable_ - bus.soc() <= 1e-12) {
            bus.mode = BusMode::Parked;
            return;
        }
        bus.mode = BusMode::DepotQueued;
        slow_queue_.push_back(bus.id);
    }

    // --- bookkeeping ------------------------------------------------------

    void apply_aux_and_track() {
        for (EngineBus& bus : buses_) {
            if (cfg_.aux_kw > 0.0 &&
                (bus.mode == BusMode::InService || bus.mode == BusMode::Deadhead)) {
                bus.aux_kwh += std::min(cfg_.aux_kw / 60.0, std::max(0.0, bus.soc()));
            }
            const double s = bus.soc();
            result_.min_soc_kwh = std::min(result_.min_soc_kwh, s);
            result_.max_soc_kwh = std::max(result_.max_soc_kwh, s);
            result_.max_onboard = std::max(result_.max_onboard, bus.onboard);
        }
    }

    long long onboard_total() const { return boarded_ - alighted_ - evacuated_count_; }

    void finalize(int horizon) {
        result_.horizon_minutes = horizon;
        result_.passengers_total = static_cast<long long>(pax_.size());
        result_.passengers_served = alighted_;
        result_.unserved_at_close = result_.passengers_total - alighted_;

        result_.wait_histogram.assign(kHistogramBins, 0);
        double wait_sum = 0.0;
        long long wait_n = 0;
        result_.waits.reserve(static_cast<std::size_t>(boarded_));
        for (std::size_t i = 0; i < pax_.size(); ++i) {
            const Passenger& p = pax_[i];
            if (p.board_minute < 0.0) continue;
            const double wait = p.board_minute - arrival_instant_[i];
            result_.waits.emplace_back(p.id, wait);
            wait_sum += wait;
            ++wait_n;
            const int bin = std::min(kHistogramBins - 1, static_cast<int>(wait));
            ++result_.wait_histogram[static_cast<std::size_t>(bin)];
            if (p.alight_minute >= 0.0) result_.alights.emplace_back(p.id, p.alight_minute);
        }
        result_.avg_wait_min = wait_n > 0 ? wait_sum / static_cast<double>(wait_n) : 0.0;

        double charged_battery = 0.0;
        for (const EngineBus& bus : buses_) {
            PerBusResult pb;
            pb.bus_id = bus.id;
            pb.distance_km = bus.odometer_km;
            pb.energy_kwh = bus.traction_kwh + bus.aux_kwh;
            pb.charged_kwh = bus.charged_kwh;
            pb.final_soc_kwh = bus.soc();
            result_.per_bus.push_back(pb);
            result_.total_distance_km += bus.odometer_km;
            result_.traction_kwh += bus.traction_kwh;
            result_.aux_kwh += bus.aux_kwh;
            charged_battery += bus.charged_kwh;
        }
        result_.charging_grid_kwh =
            result_.fast_charging_grid_kwh + result_.slow_charging_grid_kwh;
        const double losses = result_.charging_grid_kwh - charged_battery;
        result_.total_energy_kwh = result_.traction_kwh + result_.aux_kwh + losses;
    }

    const RouteModel& route_;
    const ServiceCalendar& cal_;
    const SimConfig& cfg_;
    std::vector<Passenger> pax_;
    std::vector<double> arrival_instant_;
    std::vector<char> evacuated_;
    std::vector<EngineBus> buses_;
    std::vector<StationQueue> up_queues_;
    std::vector<StationQueue> down_queues_;

    int n_stations_{};
    int terminals_[2]{};
    double usable_{};
    double start_soc_threshold_{};
    double next_due_s_[2]{};
    double last_dispatch_s_[2]{};

    std::vector<int> fast_units_[2]; // one entry per charger; -1 = free
    std::deque<int> fast_queue_[2];
    std::vector<int> slow_active_;
    std::deque<int> slow_queue_;

    long long boarded_{0};
    long long alighted_{0};
    long long evacuated_count_{0};

    SimResult result_;
};

} // namespace

SimResult run_simulation(const RouteModel& route, const ServiceCalendar& cal,
                         const SimConfig& config, const PassengerSet& demand,
                         std::uint64_t /*seed*/) {
    validate_config(config);
    validate_calendar(cal);
    if (route.station_count() < 2)
        throw ValidationError("sim: route must have at least 2 stations");
    if (config.bus_count == 0 && !demand.passengers.empty())
        throw ValidationError("sim: no buses configured for nonzero demand");
    Engine engine(route, cal, config, demand);
    SimResult result = engine.run();
    result.peak_passenger_share = demand.peak_share();
    return result;
}

} // namespace bebsim
