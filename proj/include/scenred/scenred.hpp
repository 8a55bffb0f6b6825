#pragma once

// Umbrella header for the scenario-reduction toolkit.

#include "scenred/adadelta.hpp"
#include "scenred/csv_io.hpp"
#include "scenred/dcnn.hpp"
#include "scenred/error.hpp"
#include "scenred/gradcheck.hpp"
#include "scenred/metrics.hpp"
#include "scenred/model_io.hpp"
#include "scenred/nn_layers.hpp"
#include "scenred/reducers.hpp"
#include "scenred/reports.hpp"
#include "scenred/rng.hpp"
#include "scenred/scenario_set.hpp"
#include "scenred/solar.hpp"
#include "scenred/tensor.hpp"
