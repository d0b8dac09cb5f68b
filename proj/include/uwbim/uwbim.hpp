#pragma once

// Convenience header pulling in the whole library.

#include "uwbim/core.hpp"
#include "uwbim/forward_sim.hpp"
#include "uwbim/image_analysis.hpp"
#include "uwbim/io.hpp"
#include "uwbim/migration.hpp"
#include "uwbim/pipeline.hpp"
#include "uwbim/preprocess.hpp"
