#pragma once

#include "hn/classifier.hpp"
#include "hn/error.hpp"
#include "hn/expr.hpp"
#include "hn/fixed_variable.hpp"
#include "hn/growth.hpp"
#include "hn/hyperplane.hpp"
#include "hn/integrand.hpp"
#include "hn/io.hpp"
#include "hn/kernels.hpp"
#include "hn/measure.hpp"
#include "hn/poly2.hpp"
#include "hn/polydisc.hpp"
#include "hn/quadrature.hpp"
#include "hn/verdict.hpp"
