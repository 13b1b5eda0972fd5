#pragma once

#include "livesynth/ap_table.hpp"
#include "livesynth/automata.hpp"
#include "livesynth/benchmarks.hpp"
#include "livesynth/formula.hpp"
#include "livesynth/machine.hpp"
#include "livesynth/model_check.hpp"
#include "livesynth/monitor.hpp"
#include "livesynth/parser.hpp"
#include "livesynth/problem_file.hpp"
#include "livesynth/rewrite.hpp"
#include "livesynth/sat.hpp"
#include "livesynth/semantics.hpp"
#include "livesynth/synthesis.hpp"
