#pragma once

#include "sqbessel/chebfit.hpp"
#include "sqbessel/chebyshev.hpp"
#include "sqbessel/errors.hpp"
#include "sqbessel/patch_io.hpp"
#include "sqbessel/pricing.hpp"
#include "sqbessel/processes.hpp"
#include "sqbessel/quadrature.hpp"
#include "sqbessel/report.hpp"
#include "sqbessel/rng.hpp"
#include "sqbessel/sampler.hpp"
#include "sqbessel/specfun.hpp"
#include "sqbessel/stats.hpp"
#include "sqbessel/validate.hpp"
