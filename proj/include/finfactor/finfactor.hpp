#pragma once

#include "finfactor/compression.hpp"
#include "finfactor/error.hpp"
#include "finfactor/io.hpp"
#include "finfactor/matrix_core.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/rational.hpp"
#include "finfactor/sparsity.hpp"
#include "finfactor/star_algebra.hpp"
