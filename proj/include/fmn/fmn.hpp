#pragma once

// Umbrella header: trace-driven routing and evaluation for flying multi-hop
// networks.  Pull in individual headers instead when compile time matters.

#include "channel.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "experiment.hpp"
#include "geom.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "rng.hpp"
#include "routing.hpp"
#include "textio.hpp"
#include "topology.hpp"
