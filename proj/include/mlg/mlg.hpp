#pragma once

#include "intmath.hpp"
#include "rational.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "rootdatum.hpp"
#include "metaplectic.hpp"
#include "extcalc.hpp"
#include "fieldmodel.hpp"
#include "bdmodel.hpp"
#include "comparison.hpp"
#include "harness.hpp"
#include "verify.hpp"
