#pragma once

#include "partcouple/accel/accelerator.hpp"
#include "partcouple/bench/config.hpp"
#include "partcouple/bench/csv.hpp"
#include "partcouple/bench/heatmap.hpp"
#include "partcouple/bench/optima.hpp"
#include "partcouple/bench/sweep.hpp"
#include "partcouple/core/cost.hpp"
#include "partcouple/core/coupling.hpp"
#include "partcouple/models/problem.hpp"
#include "partcouple/policy/budget_policy.hpp"
#include "partcouple/subsolver/monolithic.hpp"
