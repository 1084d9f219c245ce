#pragma once

#include "lfo/algorithms.hpp"
#include "lfo/harness.hpp"
#include "lfo/levy.hpp"
#include "lfo/local_search.hpp"
#include "lfo/objective.hpp"
#include "lfo/random.hpp"
#include "lfo/run.hpp"
#include "lfo/space.hpp"
