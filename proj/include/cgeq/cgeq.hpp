#pragma once

#include "cgeq/analysis.hpp"
#include "cgeq/hamiltonian.hpp"
#include "cgeq/observables.hpp"
#include "cgeq/states.hpp"
#include "cgeq/types.hpp"
