#pragma once

// Umbrella header for the MOL^T wave solver library: unconditionally stable
// schemes of order 2P built on O(N) recursive convolution and ADI splitting,
// with embedded Cartesian boundaries.

#include "molt/adi.hpp"
#include "molt/adi3d.hpp"
#include "molt/conv1d.hpp"
#include "molt/errors.hpp"
#include "molt/field2d.hpp"
#include "molt/geometry.hpp"
#include "molt/harness.hpp"
#include "molt/line.hpp"
#include "molt/params.hpp"
#include "molt/study.hpp"
#include "molt/wave1d.hpp"
#include "molt/wave2d.hpp"
