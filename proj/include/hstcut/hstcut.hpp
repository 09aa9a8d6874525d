#pragma once

#include "hstcut/bench.hpp"
#include "hstcut/denoise.hpp"
#include "hstcut/distances.hpp"
#include "hstcut/hst.hpp"
#include "hstcut/hst_tree.hpp"
#include "hstcut/io.hpp"
#include "hstcut/maxflow.hpp"
#include "hstcut/moves.hpp"
#include "hstcut/mrf.hpp"
#include "hstcut/solver.hpp"
