#pragma once

#include "fibfrac/analysis.hpp"
#include "fibfrac/box_count.hpp"
#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/hausdorff.hpp"
#include "fibfrac/ifs.hpp"
#include "fibfrac/io.hpp"
#include "fibfrac/parallel.hpp"
#include "fibfrac/probes.hpp"
#include "fibfrac/turtle.hpp"
#include "fibfrac/words.hpp"
