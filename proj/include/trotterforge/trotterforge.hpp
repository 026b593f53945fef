#pragma once

#include "trotterforge/dense.hpp"
#include "trotterforge/error.hpp"
#include "trotterforge/experiments.hpp"
#include "trotterforge/format.hpp"
#include "trotterforge/interaction.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/model.hpp"
#include "trotterforge/pauli.hpp"
#include "trotterforge/schedule.hpp"
#include "trotterforge/simulator.hpp"
