#pragma once

#include "scinv/geometry/io.hpp"
#include "scinv/geometry/lp.hpp"
#include "scinv/geometry/operations.hpp"
#include "scinv/geometry/polytope.hpp"
#include "scinv/geometry/projection.hpp"
#include "scinv/geometry/sampling.hpp"
#include "scinv/geometry/vertices.hpp"
