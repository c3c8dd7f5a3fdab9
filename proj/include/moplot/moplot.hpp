#pragma once

#include "types.hpp"
#include "problems.hpp"
#include "mog.hpp"
#include "fields.hpp"
#include "dominance.hpp"
#include "heatmap.hpp"
#include "efficient_sets.hpp"
#include "volume.hpp"
#include "export.hpp"
#include "pipeline.hpp"
#include "service.hpp"
