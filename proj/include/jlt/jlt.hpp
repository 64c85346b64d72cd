#pragma once

#include "jlt/core.hpp"
#include "jlt/operator_model.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/constants.hpp"
#include "jlt/bounds.hpp"
#include "jlt/birman_schwinger.hpp"
#include "jlt/ensembles.hpp"
#include "jlt/lattice.hpp"
#include "jlt/io.hpp"
#include "jlt/cli.hpp"
