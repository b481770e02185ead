#pragma once

#include "patchlv/almost_period.hpp"
#include "patchlv/bounds.hpp"
#include "patchlv/coeffs.hpp"
#include "patchlv/csv.hpp"
#include "patchlv/example51.hpp"
#include "patchlv/integrator.hpp"
#include "patchlv/model.hpp"
#include "patchlv/reports.hpp"
#include "patchlv/scenario.hpp"
#include "patchlv/stability.hpp"
#include "patchlv/svg_plot.hpp"
#include "patchlv/trajectory.hpp"
