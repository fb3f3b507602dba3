// Umbrella header.
#pragma once

#include "fgm/errors.hpp"
#include "fgm/grid.hpp"
#include "fgm/spectral.hpp"
#include "fgm/quadrature.hpp"
#include "fgm/green.hpp"
#include "fgm/ground_state.hpp"
#include "fgm/params.hpp"
#include "fgm/multibump.hpp"
#include "fgm/reduced.hpp"
#include "fgm/solver.hpp"
#include "fgm/lab.hpp"
