#pragma once

#include "mqscale/errors.hpp"
#include "mqscale/spectral.hpp"
#include "mqscale/one_qubit.hpp"
#include "mqscale/density.hpp"
#include "mqscale/two_qubit_map.hpp"
#include "mqscale/scale_solvers.hpp"
#include "mqscale/state_space.hpp"
#include "mqscale/optimizer.hpp"
#include "mqscale/oracle.hpp"
