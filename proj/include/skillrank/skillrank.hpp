#pragma once

#include "skillrank/config.hpp"
#include "skillrank/deduction.hpp"
#include "skillrank/experiment.hpp"
#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"
#include "skillrank/metrics.hpp"
#include "skillrank/netgen.hpp"
#include "skillrank/pagerank.hpp"
#include "skillrank/random.hpp"
#include "skillrank/ties.hpp"
