#pragma once

// Umbrella header for the MapReduce-style genetic algorithm library.

#include "mrga/blockstore.hpp"
#include "mrga/chromosome.hpp"
#include "mrga/engine.hpp"
#include "mrga/errors.hpp"
#include "mrga/experiment.hpp"
#include "mrga/ga.hpp"
#include "mrga/objective.hpp"
#include "mrga/rng.hpp"
