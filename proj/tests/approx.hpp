#pragma once

#include "doctest.h"

// doctest::Approx adds an absolute slack of epsilon * 1.0 by default; these tests want purely relative comparisons.
inline doctest::Approx rel_approx(double v) { return doctest::Approx(v).scale(1e-300); }
