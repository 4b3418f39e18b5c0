#pragma once

#include "baseline_dg83.hpp"
#include "calendar.hpp"
#include "cell_mask.hpp"
#include "climatology.hpp"
#include "contour_trace.hpp"
#include "detection.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "labels.hpp"
#include "parallel.hpp"
#include "tuning.hpp"
#include "uncertainty.hpp"
