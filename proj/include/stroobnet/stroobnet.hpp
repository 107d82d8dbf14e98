#pragma once

#include "stroobnet/baselines.hpp"
#include "stroobnet/distance.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/io.hpp"
#include "stroobnet/metrics.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/network.hpp"
#include "stroobnet/planner.hpp"
#include "stroobnet/proxrec.hpp"
#include "stroobnet/serialize.hpp"
