#pragma once

#include "wfisher/adjust.hpp"
#include "wfisher/combine.hpp"
#include "wfisher/continuous_target.hpp"
#include "wfisher/counter_rng.hpp"
#include "wfisher/discrete_dist.hpp"
#include "wfisher/errors.hpp"
#include "wfisher/sim.hpp"
#include "wfisher/special.hpp"
#include "wfisher/transport.hpp"
