#pragma once

#include "kaqgeom/algebra.hpp"
#include "kaqgeom/curvature.hpp"
#include "kaqgeom/dictionary.hpp"
#include "kaqgeom/ensemble.hpp"
#include "kaqgeom/eom.hpp"
#include "kaqgeom/kaq.hpp"
#include "kaqgeom/metric.hpp"
#include "kaqgeom/parallel.hpp"
#include "kaqgeom/search.hpp"
#include "kaqgeom/tensor.hpp"
