#pragma once

// Umbrella header for the SHEDAD library.

#include "anomaly.hpp"
#include "cluster.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "digest.hpp"
#include "dtw.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "series.hpp"
#include "simulator.hpp"
#include "snn.hpp"
#include "time.hpp"
