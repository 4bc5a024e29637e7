#pragma once

#include "fastgrad/error.hpp"
#include "fastgrad/vector.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/gradient_check.hpp"
#include "fastgrad/trace.hpp"
#include "fastgrad/schedule.hpp"
#include "fastgrad/ogmg.hpp"
#include "fastgrad/drivers.hpp"
#include "fastgrad/random.hpp"
#include "fastgrad/problems.hpp"
