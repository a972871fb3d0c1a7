#pragma once

#include "fblab/blowup.hpp"
#include "fblab/free_boundary_set.hpp"
