#pragma once

#include "fblab/eigenvalue.hpp"
#include "fblab/energy.hpp"
#include "fblab/error.hpp"
#include "fblab/freeboundary.hpp"
#include "fblab/grid.hpp"
#include "fblab/oracle.hpp"
#include "fblab/quadrature.hpp"
#include "fblab/smoothing.hpp"
#include "fblab/solver.hpp"
