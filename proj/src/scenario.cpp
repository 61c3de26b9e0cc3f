#include "bebsim/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bebsim/errors.hpp"

namespace bebsim {

using nlohmann::ordered_json;

int parse_hhmm(const std::string& text) {
    int h = 0;
    int m = 0;
    char sep = 0;
    std::istringstream in(text);
    if (!(in >> h >> sep >> m) || sep != ':' || !in.eof())
        throw ValidationError("calendar: expected HH:MM time, got '" + text + "'");
    if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0))
        throw ValidationError("calendar: time out of range: '" + text + "'");
    return h * 60 + m;
}

std::string format_hhmm(int minute) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

ordered_json default_scenario_json() {
    return ordered_json{
        {"metadata",
         {{"name", "lahore-metro"},
          {"description", "Lahore Metrobus corridor: 27 stations over 26.1 km, "
                          "battery-electric fleet vs incumbent diesel operation"},
          {"seed", 42}}},
        {"route",
         {{"station_count", 27},
          {"total_length_km", 26.1},
          {"depot_station", 0},
          {"stations", ordered_json::array()}}},
        {"calendar",
         {{"open", "06:15"},
          {"close", "22:15"},
          {"peak_windows", ordered_json::array({ordered_json::array({"07:00", "10:00"}),
                                                ordered_json::array({"12:00", "15:00"}),
                                                ordered_json::array({"17:00", "20:00"})})}}},
        {"demand",
         {{"lambda_peak", 10.0},
          {"lambda_offpeak", 3.0},
          {"target_daily_passengers", 95000}}},
        {"sim",
         {{"bus_count", 64},
          {"bus",
           {{"passenger_capacity", 160},
            {"battery_kwh", 350.0},
            {"usable_fraction", 0.70},
            {"km_per_kwh", 1.88},
            {"avg_speed_kmh", 40.0},
            {"dwell_s", 30.0}}},
          {"chargers",
           {{"fast_count", 10}, {"fast_kw", 325.0}, {"slow_count", 58}, {"slow_kw", 150.0}}},
          {"charge_start_threshold", 0.30},
          {"charge_stop_threshold", 0.95},
          {"charge_trigger", "arrival"},
          {"headway_peak_s", 135},
          {"headway_offpeak_s", 180},
          {"dispatch_lead_s", 1560},
          {"turnaround_s", 960},
          {"aux_kw", 47.0},
          {"charge_efficiency", 1.0}}},
        {"baseline",
         {{"fleet_in_circuit", 58},
          {"headway_peak_s", 135},
          {"headway_offpeak_s", 180},
          {"avg_speed_kmh", 40.0},
          {"max_speed_kmh", 55.0},
          {"bus_capacity", 160},
          {"avg_daily_km", 313.2}}},
        {"diesel_cost",
         {{"fleet_size", 58},
          {"bus_cost_usd", 350000.0},
          {"study_life_years", 12},
          {"mileage_km_per_l", 2.0},
          {"avg_daily_km", 415.0},
          {"maintenance_per_km", 0.3921},
          {"fuel_price_per_l", 0.7657},
          {"emission_ton_per_l", 0.002910},
          {"emission_cost_per_ton", 50.0},
          {"operating_days_per_year", 365}}},
        {"beb_cost",
         {{"fleet_size", 64},
          {"bus_cost_usd", 532000.0},
          {"slow_charger", {{"count", 58}, {"unit_cost_usd", 50000.0}, {"install_cost_usd", 17050.0}}},
          {"fast_charger",
           {{"count", 10}, {"unit_cost_usd", 495636.0}, {"install_cost_usd", 202811.0}}},
          {"battery_kwh", 350.0},
          {"battery_cost_per_kwh", 137.0},
          {"battery_life_years", 6},
          {"battery_salvage_fraction", 0.30},
          {"study_life_years", 12},
          {"mileage_km_per_kwh", 1.88},
          {"avg_daily_km", 374.0},
          {"maintenance_per_km", 0.206},
          {"emission_cost_per_ton", 50.0},
          {"electricity_price_per_kwh", 0.1143},
          {"operating_days_per_year", 365},
          {"grid_emission_anchors", ordered_json::array({ordered_json::array({2020, 0.416}),
                                                         ordered_json::array({2025, 0.351}),
                                                         ordered_json::array({2030, 0.239})})},
          {"start_year", 2022}}},
        {"sweep",
         {{"bus_counts", ordered_json::array({58, 64})},
          {"battery_sizes_kwh", ordered_json::array({350.0, 400.0})},
          {"fast_charger_counts", ordered_json::array({2, 4, 6, 8, 10, 12, 14})},
          {"seeds", ordered_json::array({1, 2, 3, 4, 5, 6, 7, 8, 9, 10})},
          {"wait_tolerance_min", nullptr}}},
    };
}

namespace {

bool same_kind(const ordered_json& a, const ordered_json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

void merge_strict(ordered_json& base, const ordered_json& overlay, const std::string& path) {
    if (!overlay.is_object())
        throw ValidationError("config: expected an object at '" + (path.empty() ? "<root>" : path) + "'");
    for (const auto& [key, value] : overlay.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key))
            throw ValidationError("config: unknown key '" + here + "'");
        ordered_json& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_strict(slot, value, here);
        } else if (slot.is_null() || value.is_null() || same_kind(slot, value)) {
            slot = value;
        } else {
            throw ValidationError("config: type mismatch at '" + here + "' (expected " +
                                  std::string(slot.type_name()) + ", got " +
                                  std::string(value.type_name()) + ")");
        }
    }
}

class Field {
public:
    Field(const ordered_json& node, std::string path) : node_(node), path_(std::move(path)) {}

    Field at(const std::string& key) const {
        return Field(node_.at(key), path_.empty() ? key : path_ + "." + key);
    }

    double num(double lo = -1e308, double hi = 1e308) const {
        if (!node_.is_number())
            throw ValidationError("config: '" + path_ + "' must be a number");
        const double v = node_.get<double>();
        if (v < lo || v > hi)
            throw ValidationError("config: '" + path_ + "' out of range [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    int integer(int lo, int hi) const {
        if (!node_.is_number_integer())
            throw ValidationError("config: '" + path_ + "' must be an integer");
        const long long v = node_.get<long long>();
        if (v < lo || v > hi)
            throw ValidationError("config: '" + path_ + "' out of range [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    }

    long long integer64(long long lo, long long hi) const {
        if (!node_.is_number_integer())
            throw ValidationError("config: '" + path_ + "' must be an integer");
        const long long v = node_.get<long long>();
        if (v < lo || v > hi)
            throw ValidationError("config: '" + path_ + "' out of range");
        return v;
    }

    std::string str() const {
        if (!node_.is_string())
            throw ValidationError("config: '" + path_ + "' must be a string");
        return node_.get<std::string>();
    }

    const ordered_json& raw() const { return node_; }
    const std::string& path() const { return path_; }

private:
    const ordered_json& node_;
    std::string path_;
};

RouteModel extract_route(const Field& f) {
    const ordered_json& stations = f.at("stations").raw();
    const int depot = f.at("depot_station").integer(0, 100000);
    if (stations.is_array() && !stations.empty()) {
        std::vector<std::pair<std::string, double>> spec;
        for (const auto& st : stations) {
            if (!st.is_object() || !st.contains("name") || !st.contains("distance_km"))
                throw ValidationError("config: route.stations entries need {name, distance_km}");
            spec.emplace_back(st.at("name").get<std::string>(), st.at("distance_km").get<double>());
        }
        return build_route(spec, depot);
    }
    const int count = f.at("station_count").integer(2, 10000);
    const double length = f.at("total_length_km").num(1e-9, 1e6);
    return build_route(uniform_station_spec(count, length), depot);
}

ServiceCalendar extract_calendar(const Field& f) {
    ServiceCalendar cal;
    cal.open_minute = parse_hhmm(f.at("open").str());
    cal.close_minute = parse_hhmm(f.at("close").str());
    for (const auto& w : f.at("peak_windows").raw()) {
        if (!w.is_array() || w.size() != 2 || !w[0].is_string() || !w[1].is_string())
            throw ValidationError("config: calendar.peak_windows entries must be [\"HH:MM\", \"HH:MM\"]");
        cal.peak_windows.push_back(
            PeakWindow{parse_hhmm(w[0].get<std::string>()), parse_hhmm(w[1].get<std::string>())});
    }
    validate_calendar(cal);
    return cal;
}

DemandParams extract_demand(const Field& f) {
    DemandParams d;
    d.lambda_peak = f.at("lambda_peak").num(0.0, 1e6);
    d.lambda_offpeak = f.at("lambda_offpeak").num(0.0, 1e6);
    d.target_daily_passengers = f.at("target_daily_passengers").integer64(0, 100000000);
    if (d.lambda_peak < d.lambda_offpeak)
        throw ValidationError("config: demand.lambda_peak must be >= demand.lambda_offpeak");
    return d;
}

SimConfig extract_sim(const Field& f) {
    SimConfig c;
    c.bus_count = f.at("bus_count").integer(1, 100000);
    const Field bus = f.at("bus");
    c.bus.passenger_capacity = bus.at("passenger_capacity").integer(1, 100000);
    c.bus.battery_kwh = bus.at("battery_kwh").num(1e-9, 1e9);
    c.bus.usable_fraction = bus.at("usable_fraction").num(1e-9, 1.0);
    c.bus.energy_per_km = 1.0 / bus.at("km_per_kwh").num(1e-9, 1e9);
    c.bus.avg_speed_kmh = bus.at("avg_speed_kmh").num(1e-9, 1000.0);
    c.bus.dwell_s = bus.at("dwell_s").num(0.0, 3600.0);
    const Field ch = f.at("chargers");
    c.chargers.fast_count = ch.at("fast_count").integer(0, 100000);
    c.chargers.fast_kw = ch.at("fast_kw").num(1e-9, 1e9);
    c.chargers.slow_count = ch.at("slow_count").integer(0, 100000);
    c.chargers.slow_kw = ch.at("slow_kw").num(1e-9, 1e9);
    c.charge_start_threshold = f.at("charge_start_threshold").num(0.0, 1.0);
    c.charge_stop_threshold = f.at("charge_stop_threshold").num(0.0, 1.0);
    const std::string trigger = f.at("charge_trigger").str();
    if (trigger == "arrival")
        c.charge_trigger = ChargeTrigger::Arrival;
    else if (trigger == "depleted")
        c.charge_trigger = ChargeTrigger::Depleted;
    else
        throw ValidationError("config: sim.charge_trigger must be 'arrival' or 'depleted'");
    c.headway_peak_s = f.at("headway_peak_s").integer(1, 86400);
    c.headway_offpeak_s = f.at("headway_offpeak_s").integer(1, 86400);
    c.dispatch_lead_s = f.at("dispatch_lead_s").integer(0, 86400);
    c.turnaround_s = f.at("turnaround_s").integer(0, 86400);
    c.aux_kw = f.at("aux_kw").num(0.0, 1e6);
    c.charge_efficiency = f.at("charge_efficiency").num(1e-9, 1.0);
    validate_config(c);
    return c;
}

BaselineDieselOps extract_baseline(const Field& f) {
    BaselineDieselOps b;
    b.fleet_in_circuit = f.at("fleet_in_circuit").integer(1, 100000);
    b.headway_peak_s = f.at("headway_peak_s").integer(1, 86400);
    b.headway_offpeak_s = f.at("headway_offpeak_s").integer(1, 86400);
    b.avg_speed_kmh = f.at("avg_speed_kmh").num(1e-9, 1000.0);
    b.max_speed_kmh = f.at("max_speed_kmh").num(1e-9, 1000.0);
    b.bus_capacity = f.at("bus_capacity").integer(1, 100000);
    b.avg_daily_distance_km = f.at("avg_daily_km").num(0.0, 1e6);
    validate_baseline(b);
    return b;
}

DieselCostModel extract_diesel_cost(const Field& f) {
    DieselCostModel m;
    m.fleet_size = f.at("fleet_size").integer(1, 1000000);
    m.bus_cost_usd = f.at("bus_cost_usd").num(0.0, 1e12);
    m.study_life_years = f.at("study_life_years").integer(1, 200);
    m.mileage_km_per_l = f.at("mileage_km_per_l").num(1e-9, 1e6);
    m.avg_daily_km = f.at("avg_daily_km").num(0.0, 1e6);
    m.maintenance_per_km = f.at("maintenance_per_km").num(0.0, 1e6);
    m.fuel_price_per_l = f.at("fuel_price_per_l").num(0.0, 1e6);
    m.emission_ton_per_l = f.at("emission_ton_per_l").num(0.0, 1.0);
    m.emission_cost_per_ton = f.at("emission_cost_per_ton").num(0.0, 1e9);
    m.operating_days_per_year = f.at("operating_days_per_year").integer(1, 366);
    validate_cost_model(m);
    return m;
}

BebCostModel extract_beb_cost(const Field& f) {
    BebCostModel m;
    m.fleet_size = f.at("fleet_size").integer(1, 1000000);
    m.bus_cost_usd = f.at("bus_cost_usd").num(0.0, 1e12);
    const Field slow = f.at("slow_charger");
    m.slow_charger = ChargerCost{slow.at("count").integer(0, 1000000),
                                 slow.at("unit_cost_usd").num(0.0, 1e12),
                                 slow.at("install_cost_usd").num(0.0, 1e12)};
    const Field fast = f.at("fast_charger");
    m.fast_charger = ChargerCost{fast.at("count").integer(0, 1000000),
                                 fast.at("unit_cost_usd").num(0.0, 1e12),
                                 fast.at("install_cost_usd").num(0.0, 1e12)};
    m.battery_kwh = f.at("battery_kwh").num(1e-9, 1e9);
    m.battery_cost_per_kwh = f.at("battery_cost_per_kwh").num(0.0, 1e9);
    m.battery_life_years = f.at("battery_life_years").integer(1, 200);
    m.battery_salvage_fraction = f.at("battery_salvage_fraction").num(0.0, 1.0);
    m.study_life_years = f.at("study_life_years").integer(1, 200);
    m.mileage_km_per_kwh = f.at("mileage_km_per_kwh").num(1e-9, 1e6);
    m.avg_daily_km = f.at("avg_daily_km").num(0.0, 1e6);
    m.maintenance_per_km = f.at("maintenance_per_km").num(0.0, 1e6);
    m.emission_cost_per_ton = f.at("emission_cost_per_ton").num(0.0, 1e9);
    m.electricity_price_per_kwh = f.at("electricity_price_per_kwh").num(0.0, 1e6);
    m.operating_days_per_year = f.at("operating_days_per_year").integer(1, 366);
    m.grid.anchors.clear();
    for (const auto& a : f.at("grid_emission_anchors").raw()) {
        if (!a.is_array() || a.size() != 2)
            throw ValidationError("config: beb_cost.grid_emission_anchors entries must be [year, kg_per_kwh]");
        m.grid.anchors.emplace_back(a[0].get<int>(), a[1].get<double>());
    }
    if (m.grid.anchors.empty())
        throw ValidationError("config: beb_cost.grid_emission_anchors must be non-empty");
    for (std::size_t i = 1; i < m.grid.anchors.size(); ++i)
        if (m.grid.anchors[i].first <= m.grid.anchors[i - 1].first)
            throw ValidationError("config: grid_emission_anchors years must be strictly increasing");
    for (const auto& [year, factor] : m.grid.anchors)
        if (factor <= 0.0)
            throw ValidationError("config: grid emission factors must be positive");
    m.start_year = f.at("start_year").integer(1900, 3000);
    validate_cost_model(m);
    return m;
}

void extract_sweep(const Field& f, Scenario& s) {
    if (f.raw().is_null()) {
        s.has_sweep = false;
        return;
    }
    s.has_sweep = true;
    s.sweep.bus_counts.clear();
    for (const auto& v : f.at("bus_counts").raw()) s.sweep.bus_counts.push_back(v.get<int>());
    s.sweep.battery_sizes_kwh.clear();
    for (const auto& v : f.at("battery_sizes_kwh").raw())
        s.sweep.battery_sizes_kwh.push_back(v.get<double>());
    s.sweep.fast_charger_counts.clear();
    for (const auto& v : f.at("fast_charger_counts").raw())
        s.sweep.fast_charger_counts.push_back(v.get<int>());
    s.sweep.seeds.clear();
    for (const auto& v : f.at("seeds").raw()) s.sweep.seeds.push_back(v.get<std::uint64_t>());
    validate_grid(s.sweep);
    const ordered_json& tol = f.at("wait_tolerance_min").raw();
    if (!tol.is_null()) {
        if (!tol.is_number() || tol.get<double>() < 0.0)
            throw ValidationError("config: sweep.wait_tolerance_min must be a non-negative number");
        s.sweep_wait_tolerance_min = tol.get<double>();
    }
}

} // namespace

Scenario scenario_from_json(const ordered_json& overlay) {
    ordered_json effective = default_scenario_json();
    merge_strict(effective, overlay, "");

    Scenario s;
    s.effective = effective;
    const Field root(effective, "");
    const Field meta = root.at("metadata");
    s.name = meta.at("name").str();
    s.description = meta.at("description").str();
    s.seed = static_cast<std::uint64_t>(meta.at("seed").integer64(0, 9223372036854775807LL));
    s.route = extract_route(root.at("route"));
    s.calendar = extract_calendar(root.at("calendar"));
    s.demand = extract_demand(root.at("demand"));
    s.sim = extract_sim(root.at("sim"));
    s.baseline = extract_baseline(root.at("baseline"));
    s.diesel_cost = extract_diesel_cost(root.at("diesel_cost"));
    s.beb_cost = extract_beb_cost(root.at("beb_cost"));
    extract_sweep(root.at("sweep"), s);
    return s;
}

namespace {

void apply_override(ordered_json& tree, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("config: --set expects key=value, got '" + spec + "'");
    const std::string key = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);

    ordered_json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!node->is_object() || !node->contains(part))
            throw ValidationError("config: --set references unknown key '" + key + "'");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    ordered_json parsed = ordered_json::parse(value, nullptr, false);
    if (parsed.is_discarded())
        parsed = value; // plain string value
    if (!node->is_null() && !parsed.is_null() && !same_kind(*node, parsed) &&
        !(node->is_object() || node->is_array()))
        throw ValidationError("config: --set type mismatch for '" + key + "'");
    *node = parsed;
}

} // namespace

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    ordered_json overlay = ordered_json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw ValidationError("config: cannot open '" + path + "'");
        try {
            overlay = ordered_json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("config: " + std::string(e.what()));
        }
    }
    ordered_json effective = default_scenario_json();
    merge_strict(effective, overlay, "");
    for (const std::string& o : overrides)
        apply_override(effective, o);
    return scenario_from_json(effective);
}

std::string scenario_hash(const Scenario& scenario) {
    ordered_json canonical = scenario.effective;
    canonical["metadata"].erase("name");
    canonical["metadata"].erase("description");
    const std::string dump = canonical.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace bebsim
