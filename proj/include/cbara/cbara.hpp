#pragma once

#include "cbara/types.hpp"
#include "cbara/rng.hpp"
#include "cbara/scenario.hpp"
#include "cbara/scenario_io.hpp"
#include "cbara/channel.hpp"
#include "cbara/estimation.hpp"
#include "cbara/comms.hpp"
#include "cbara/allocation.hpp"
#include "cbara/objective.hpp"
#include "cbara/projection.hpp"
#include "cbara/projected_gradient.hpp"
#include "cbara/solvers.hpp"
#include "cbara/mission.hpp"
#include "cbara/sweep.hpp"
#include "cbara/io.hpp"
#include "cbara/invariants.hpp"
