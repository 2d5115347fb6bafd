#pragma once

#include "omniproj/analysis.hpp"
#include "omniproj/config.hpp"
#include "omniproj/geometry.hpp"
#include "omniproj/image.hpp"
#include "omniproj/io.hpp"
#include "omniproj/metrics.hpp"
#include "omniproj/pattern.hpp"
#include "omniproj/pipeline.hpp"
#include "omniproj/projection.hpp"
#include "omniproj/resample.hpp"
#include "omniproj/scaler.hpp"
#include "omniproj/vec.hpp"
