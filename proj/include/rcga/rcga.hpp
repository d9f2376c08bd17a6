#pragma once

// Umbrella header.

#include "rcga/errors.hpp"
#include "rcga/rational.hpp"
#include "rcga/rng.hpp"
#include "rcga/stats.hpp"

#include "rcga/fitness.hpp"
#include "rcga/frequency_matrix.hpp"
#include "rcga/hierarchy.hpp"
#include "rcga/instrumentation.hpp"

#include "rcga/eda.hpp"
#include "rcga/theory_oracles.hpp"

#include "rcga/experiment.hpp"
#include "rcga/plot.hpp"
