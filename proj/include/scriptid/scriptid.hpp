#pragma once

#include "scriptid/crossval.hpp"
#include "scriptid/error.hpp"
#include "scriptid/features.hpp"
#include "scriptid/gabor.hpp"
#include "scriptid/knn.hpp"
#include "scriptid/metrics.hpp"
#include "scriptid/mlp.hpp"
#include "scriptid/model_io.hpp"
#include "scriptid/preprocess.hpp"
#include "scriptid/quadtree.hpp"
#include "scriptid/raster.hpp"
#include "scriptid/synth.hpp"
