#pragma once

#include "gll/errors.hpp"
#include "gll/special_functions.hpp"
#include "gll/quadrature.hpp"
#include "gll/params.hpp"
#include "gll/distribution.hpp"
#include "gll/sampler.hpp"
#include "gll/optimize.hpp"
#include "gll/estimator.hpp"
#include "gll/dataset.hpp"
#include "gll/regression.hpp"
#include "gll/premium.hpp"
#include "gll/analysis.hpp"
