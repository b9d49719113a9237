#pragma once

// Umbrella header.

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"
#include "maximin/scoring.hpp"
#include "maximin/laplace_1d.hpp"
#include "maximin/spline.hpp"
#include "maximin/synthetic.hpp"
#include "maximin/dataset.hpp"
#include "maximin/config.hpp"
#include "maximin/harness.hpp"
#include "maximin/checks.hpp"
