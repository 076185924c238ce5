#pragma once

#include "posauc/model.hpp"
#include "posauc/agg.hpp"
#include "posauc/mechanism_spec.hpp"
#include "posauc/encoders.hpp"
#include "posauc/mechanisms.hpp"
#include "posauc/metrics.hpp"
#include "posauc/solver.hpp"
#include "posauc/stats.hpp"
#include "posauc/json_io.hpp"
#include "posauc/experiment.hpp"
