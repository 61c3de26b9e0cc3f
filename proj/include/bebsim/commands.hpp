#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bebsim/scenario.hpp"

namespace bebsim {

struct CommandOptions {
    std::string out_dir{"out"};
    std::optional<std::uint64_t> seed; // overrides the scenario's seed
    bool quiet{false};
    bool include_emissions{true}; // tco only
};

// Exit codes: 0 success, 1 validation, 2 runtime/IO.
int cmd_simulate(const Scenario& scenario, const CommandOptions& opts);
int cmd_tco(const Scenario& scenario, const CommandOptions& opts);
int cmd_sweep(const Scenario& scenario, const CommandOptions& opts);
int cmd_demand(const Scenario& scenario, const CommandOptions& opts);

} // namespace bebsim
