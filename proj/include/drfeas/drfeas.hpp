#pragma once

#include "drfeas/errors.hpp"
#include "drfeas/numerics.hpp"
#include "drfeas/convex_fn.hpp"
#include "drfeas/sets.hpp"
#include "drfeas/dra.hpp"
#include "drfeas/analysis.hpp"
#include "drfeas/classify.hpp"
#include "drfeas/scenarios.hpp"
#include "drfeas/io.hpp"
