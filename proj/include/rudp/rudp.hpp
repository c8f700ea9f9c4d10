#pragma once

#include "rudp/baselines.hpp"
#include "rudp/bench.hpp"
#include "rudp/config.hpp"
#include "rudp/data.hpp"
#include "rudp/graph.hpp"
#include "rudp/matrix.hpp"
#include "rudp/metrics.hpp"
#include "rudp/projection.hpp"
#include "rudp/qpsm.hpp"
#include "rudp/scatter.hpp"
