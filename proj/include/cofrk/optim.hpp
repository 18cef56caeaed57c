#pragma once

#include <functional>

namespace cofrk {

struct ScalarResult {
  double x = 0.0;
  double value = 0.0;
  int evals = 0;
};

/// Golden-section maximization on [lo, hi]; deterministic, derivative-free.
/// Returns the best point among the bracket interior and both endpoints.
ScalarResult golden_section_max(const std::function<double(double)>& f,
                                double lo, double hi,
                                double x_tol, int max_evals);

struct RootResult {
  double x = 0.0;
  bool bracketed = false;  // false when f has one sign over the whole interval
  int evals = 0;
};

/// Bisection for a root of f on [lo, hi]. Without a sign change the endpoint
/// whose direction f favors is returned with bracketed = false.
RootResult bisect_root(const std::function<double(double)>& f,
                       double lo, double hi,
                       double x_tol, int max_iters);

}  // namespace cofrk
