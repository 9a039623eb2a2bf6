#pragma once

#include "wsnopt/config.hpp"
#include "wsnopt/error.hpp"
#include "wsnopt/evaluation.hpp"
#include "wsnopt/geometry.hpp"
#include "wsnopt/optimizers.hpp"
#include "wsnopt/records.hpp"
#include "wsnopt/results.hpp"
#include "wsnopt/search.hpp"
#include "wsnopt/stats.hpp"
