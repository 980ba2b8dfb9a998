#pragma once

#include "hetnet/channel.hpp"
#include "hetnet/config.hpp"
#include "hetnet/config_io.hpp"
#include "hetnet/csv.hpp"
#include "hetnet/dl_precoding.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/geometry.hpp"
#include "hetnet/layout.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/random.hpp"
#include "hetnet/scenarios.hpp"
#include "hetnet/special_functions.hpp"
#include "hetnet/tradeoff.hpp"
#include "hetnet/ul_solver.hpp"
#include "hetnet/units.hpp"
