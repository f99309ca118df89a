#pragma once

// Umbrella header for the Shintani zeta toolkit.

#include "shintani/errors.hpp"
#include "shintani/matrix.hpp"
#include "shintani/flow.hpp"
#include "shintani/polyhedra.hpp"
#include "shintani/pole_structure.hpp"
#include "shintani/weight_decomp.hpp"
#include "shintani/accum.hpp"
#include "shintani/gamma.hpp"
#include "shintani/zeta_eval.hpp"
#include "shintani/json_io.hpp"
