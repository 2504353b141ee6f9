#pragma once

#include "subdiff/error.hpp"
#include "subdiff/ext_real.hpp"
#include "subdiff/point.hpp"
#include "subdiff/model.hpp"
#include "subdiff/maps.hpp"
#include "subdiff/moreau.hpp"
#include "subdiff/oracles.hpp"
#include "subdiff/calculus.hpp"
#include "subdiff/sets.hpp"
#include "subdiff/network.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/direction.hpp"
#include "subdiff/line_search.hpp"
#include "subdiff/solver.hpp"
#include "subdiff/verify.hpp"
#include "subdiff/io.hpp"
