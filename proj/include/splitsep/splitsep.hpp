#pragma once

#include "splitsep/error.hpp"
#include "splitsep/harmonics.hpp"
#include "splitsep/inner_solver.hpp"
#include "splitsep/inverse_series.hpp"
#include "splitsep/io.hpp"
#include "splitsep/melnikov.hpp"
#include "splitsep/ode.hpp"
#include "splitsep/splitting.hpp"
#include "splitsep/stokes_analytic.hpp"
