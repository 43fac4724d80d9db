#pragma once

// Umbrella header: swing-dynamics network model, NI/SNI analysis,
// distributed edge controllers, simulation, and scenario I/O.

#include "nigrid/controller.hpp"
#include "nigrid/csv.hpp"
#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"
#include "nigrid/ni.hpp"
#include "nigrid/report.hpp"
#include "nigrid/scenario.hpp"
#include "nigrid/state_space.hpp"
#include "nigrid/svg.hpp"
#include "nigrid/swing.hpp"
#include "nigrid/transfer_function.hpp"
