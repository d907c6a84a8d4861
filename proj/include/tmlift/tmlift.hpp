#pragma once

#include "tmlift/dual.hpp"
#include "tmlift/expr.hpp"
#include "tmlift/field.hpp"
#include "tmlift/fixtures.hpp"
#include "tmlift/geometry.hpp"
#include "tmlift/lift.hpp"
#include "tmlift/linalg.hpp"
#include "tmlift/scenario.hpp"
#include "tmlift/verify.hpp"
