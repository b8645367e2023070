#pragma once

// Umbrella header: pulls in the full pricing, simulation, asymptotics, and
// market-fitting toolkit.

#include "invvol/asymptotics.hpp"
#include "invvol/bergomi.hpp"
#include "invvol/errors.hpp"
#include "invvol/inverse_bs.hpp"
#include "invvol/iv_solver.hpp"
#include "invvol/market_data.hpp"
#include "invvol/mc.hpp"
#include "invvol/models.hpp"
#include "invvol/parallel.hpp"
#include "invvol/paths.hpp"
#include "invvol/quadrature.hpp"
#include "invvol/rng.hpp"
#include "invvol/roots.hpp"
#include "invvol/special.hpp"
