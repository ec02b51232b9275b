#pragma once

// Umbrella header for the germ-forge engine: exact jets over arbitrary-
// precision rationals, truncated exterior calculus, graded decomposition
// solvers with obstruction certificates, the deformation normalizer, and
// the problem-file DSL.

#include "germforge/rational.hpp"
#include "germforge/monomial.hpp"
#include "germforge/jet.hpp"
#include "germforge/tpoly.hpp"
#include "germforge/pform.hpp"
#include "germforge/tform.hpp"
#include "germforge/linsolve.hpp"
#include "germforge/decompose.hpp"
#include "germforge/normalize.hpp"
#include "germforge/quasihom.hpp"
#include "germforge/format.hpp"
#include "germforge/dsl.hpp"
#include "germforge/run.hpp"
