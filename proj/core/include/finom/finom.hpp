#pragma once

#include "finom/dense.hpp"
#include "finom/error.hpp"
#include "finom/kernel1d.hpp"
#include "finom/kernel2d.hpp"
#include "finom/matrix.hpp"
#include "finom/mesh.hpp"
#include "finom/problem.hpp"
#include "finom/solver.hpp"
