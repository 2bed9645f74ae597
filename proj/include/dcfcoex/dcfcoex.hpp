#ifndef DCFCOEX_DCFCOEX_HPP_
#define DCFCOEX_DCFCOEX_HPP_

#include "dcfcoex/analytic.hpp"
#include "dcfcoex/harness.hpp"
#include "dcfcoex/rng.hpp"
#include "dcfcoex/scenario.hpp"
#include "dcfcoex/scenario_json.hpp"
#include "dcfcoex/simulator.hpp"
#include "dcfcoex/stats.hpp"
#include "dcfcoex/svg.hpp"

#endif  // DCFCOEX_DCFCOEX_HPP_
