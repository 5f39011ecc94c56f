#pragma once

#include <vector>

#include "ampd/linalg.hpp"

namespace ampd {

/// One row of a solver trace.
struct TraceRecord {
  long k = 0;
  double alpha = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double feas = 0.0;
  double kkt = 0.0;
  double gap_est = 0.0;   ///< NaN when no reference set was supplied
  bool gap_stale = false; ///< carried forward from an earlier iteration
  double wall_time = 0.0; ///< seconds since solve() started
  Vector f_values;
};

using Trace = std::vector<TraceRecord>;

}  // namespace ampd
