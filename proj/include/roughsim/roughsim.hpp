#pragma once

#include "roughsim/bench.hpp"
#include "roughsim/black_scholes.hpp"
#include "roughsim/convolution.hpp"
#include "roughsim/errors.hpp"
#include "roughsim/fft.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/kernels.hpp"
#include "roughsim/matrix.hpp"
#include "roughsim/models.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/pathset_io.hpp"
#include "roughsim/pricing.hpp"
#include "roughsim/quadrature.hpp"
#include "roughsim/rng.hpp"
#include "roughsim/shocks.hpp"
#include "roughsim/stats.hpp"
#include "roughsim/tree.hpp"
#include "roughsim/version.hpp"
#include "roughsim/volterra.hpp"
