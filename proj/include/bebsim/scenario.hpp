#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bebsim/demand.hpp"
#include "bebsim/route.hpp"
#include "bebsim/sim.hpp"
#include "bebsim/sweep.hpp"
#include "bebsim/tco.hpp"

namespace bebsim {

// Fully validated run configuration. Defaults reproduce the Lahore Metro case
// study, so an empty overlay (or no --config at all) runs that scenario.
struct Scenario {
    std::string name;
    std::string description;
    std::uint64_t seed{42};

    RouteModel route;
    ServiceCalendar calendar;
    DemandParams demand;
    SimConfig sim;
    BaselineDieselOps baseline;
    DieselCostModel diesel_cost;
    BebCostModel beb_cost;

    bool has_sweep{false};
    SweepGrid sweep;
    std::optional<double> sweep_wait_tolerance_min;

    // The merged configuration tree the scenario was built from.
    nlohmann::ordered_json effective;
};

// The complete default configuration (Lahore values).
nlohmann::ordered_json default_scenario_json();

// Strict-merges the overlay onto the defaults (unknown keys and type
// mismatches are errors), then validates every section.
Scenario scenario_from_json(const nlohmann::ordered_json& overlay);

// Loads an overlay file (empty path = defaults) and applies --set overrides
// ("dotted.key=value"; values parse as JSON, falling back to strings).
Scenario load_scenario(const std::string& path,
                       const std::vector<std::string>& overrides = {});

// FNV-1a hash of the canonical configuration, excluding fields that cannot
// affect results (metadata name/description). Hex string.
std::string scenario_hash(const Scenario& scenario);

int parse_hhmm(const std::string& text);
std::string format_hhmm(int minute);

} // namespace bebsim
