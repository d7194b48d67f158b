#pragma once

#include "analytic.hpp"
#include "core.hpp"
#include "decoder.hpp"
#include "harness.hpp"
#include "random.hpp"
#include "sim.hpp"
