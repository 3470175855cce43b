// Umbrella header. report_io.hpp is left out because it pulls in nlohmann/json.
#pragma once

#include "experiments.hpp"
#include "linalg.hpp"
#include "optimize.hpp"
#include "spin.hpp"
#include "state.hpp"
#include "witness.hpp"
