#pragma once

// Batched cubic trajectory interpolation: constant fitting matrix, block-
// diagonal batching across trajectories, matrix-product evaluation at
// parameter ticks, SPMD sharding, and the supporting CFL/flop/error
// calculators.

#include "splineflow/analysis.hpp"
#include "splineflow/batch.hpp"
#include "splineflow/config.hpp"
#include "splineflow/errors.hpp"
#include "splineflow/evaluate.hpp"
#include "splineflow/field.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/geometry.hpp"
#include "splineflow/io.hpp"
#include "splineflow/partition.hpp"
#include "splineflow/pipeline.hpp"
#include "splineflow/spline.hpp"
