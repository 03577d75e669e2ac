#pragma once

#include "error.hpp"
#include "chart.hpp"
#include "sphere.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "arrangement.hpp"
#include "measure.hpp"
#include "flow.hpp"
#include "lens.hpp"
#include "iso2d.hpp"
#include "bodyspec.hpp"
#include "report.hpp"
#include "experiment.hpp"
