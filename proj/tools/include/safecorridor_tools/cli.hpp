#pragma once

#include <iosfwd>
#include <string>

#include "safecorridor/planners.hpp"
#include "safecorridor/scenario.hpp"

namespace safecorridor::tools {

enum ExitCode : int { kExitOk = 0, kExitNotFound = 1, kExitUsage = 2 };

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Configuration space for 2-DoF robots, workspace with arm poses otherwise.
std::string render_plan_svg(const Scenario& scenario, const PlanResult& result);

}  // namespace safecorridor::tools
