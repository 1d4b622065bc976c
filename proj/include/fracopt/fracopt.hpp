#pragma once

#include "fracopt/apps.hpp"
#include "fracopt/errors.hpp"
#include "fracopt/expr.hpp"
#include "fracopt/functional.hpp"
#include "fracopt/io.hpp"
#include "fracopt/measures.hpp"
#include "fracopt/oracle.hpp"
#include "fracopt/reduction.hpp"
#include "fracopt/rng.hpp"
#include "fracopt/version.hpp"
