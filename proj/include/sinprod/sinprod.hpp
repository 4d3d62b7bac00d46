#pragma once

#include "sinprod/angle.hpp"
#include "sinprod/error.hpp"
#include "sinprod/json.hpp"
#include "sinprod/lattice.hpp"
#include "sinprod/measure.hpp"
#include "sinprod/optimize.hpp"
#include "sinprod/parse.hpp"
#include "sinprod/product.hpp"
#include "sinprod/quadrature.hpp"
#include "sinprod/random.hpp"
#include "sinprod/semicontinuity.hpp"
#include "sinprod/sinpi.hpp"
#include "sinprod/special_values.hpp"
#include "sinprod/summation.hpp"
