// eqmflow.hpp - umbrella header.

#pragma once

#include "eqmflow/error.hpp"
#include "eqmflow/linalg.hpp"
#include "eqmflow/random.hpp"
#include "eqmflow/state.hpp"
#include "eqmflow/serialize.hpp"
#include "eqmflow/poisson.hpp"
#include "eqmflow/integrator.hpp"
#include "eqmflow/lie.hpp"
#include "eqmflow/trajectory.hpp"
#include "eqmflow/dynamics.hpp"
#include "eqmflow/mixtures.hpp"
#include "eqmflow/hartree_fock.hpp"
#include "eqmflow/meanfield.hpp"
#include "eqmflow/suites.hpp"
#include "eqmflow/scenario.hpp"
