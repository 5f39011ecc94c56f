#pragma once

#include "ampd/baselines.hpp"
#include "ampd/bench.hpp"
#include "ampd/diagnostics.hpp"
#include "ampd/error.hpp"
#include "ampd/flow.hpp"
#include "ampd/linalg.hpp"
#include "ampd/problem.hpp"
#include "ampd/problem_io.hpp"
#include "ampd/problems.hpp"
#include "ampd/rng.hpp"
#include "ampd/simplex_qp.hpp"
#include "ampd/solver.hpp"
#include "ampd/trace.hpp"
