#pragma once

#include "scsynth/ir.hpp"
#include "scsynth/validity.hpp"
#include "scsynth/bitgen.hpp"
#include "scsynth/simulator.hpp"
#include "scsynth/cost.hpp"
#include "scsynth/synth.hpp"
#include "scsynth/exhaustive.hpp"
#include "scsynth/bench.hpp"
#include "scsynth/specfile.hpp"
