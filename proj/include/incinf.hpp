#pragma once

#include "incinf/analytics.hpp"
#include "incinf/benchmark.hpp"
#include "incinf/error.hpp"
#include "incinf/generator.hpp"
#include "incinf/graph.hpp"
#include "incinf/incremental.hpp"
#include "incinf/io.hpp"
#include "incinf/localization.hpp"
#include "incinf/random.hpp"
#include "incinf/selection.hpp"
#include "incinf/spread.hpp"
