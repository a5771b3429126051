#ifndef PRATE_PRATE_HPP
#define PRATE_PRATE_HPP

#include "prate/approximations.hpp"
#include "prate/codecs.hpp"
#include "prate/distributions.hpp"
#include "prate/errors.hpp"
#include "prate/exact_limits.hpp"
#include "prate/exponents.hpp"
#include "prate/numeric.hpp"
#include "prate/type_order.hpp"
#include "prate/types_census.hpp"

#endif  // PRATE_PRATE_HPP
