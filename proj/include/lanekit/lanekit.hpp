// Umbrella header.
#pragma once

#include "lanekit/commands.hpp"
#include "lanekit/config.hpp"
#include "lanekit/core.hpp"
#include "lanekit/frame_io.hpp"
#include "lanekit/lane.hpp"
#include "lanekit/matching.hpp"
#include "lanekit/metrics.hpp"
#include "lanekit/modeling.hpp"
#include "lanekit/parallel.hpp"
#include "lanekit/projection.hpp"
#include "lanekit/synth.hpp"
