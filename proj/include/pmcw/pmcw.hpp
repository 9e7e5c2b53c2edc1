#pragma once

// Umbrella header pulling in the whole library.

#include "pmcw/correlation.hpp"
#include "pmcw/design_grid.hpp"
#include "pmcw/hermitian_form.hpp"
#include "pmcw/io.hpp"
#include "pmcw/loading.hpp"
#include "pmcw/metrics.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/quadratic_form.hpp"
#include "pmcw/radar.hpp"
#include "pmcw/rng.hpp"
#include "pmcw/runner.hpp"
#include "pmcw/solver.hpp"
#include "pmcw/types.hpp"
