#include "cofrk/optim.hpp"

#include <cmath>

namespace cofrk {

ScalarResult golden_section_max(const std::function<double(double)>& f,
                                double lo, double hi,
                                double x_tol, int max_evals) {
  const double inv_phi = 2.0 / (1.0 + std::sqrt(5.0));
  double a = lo, b = hi;
  ScalarResult best;
  best.x = a;
  best.value = f(a);
  best.evals = 1;
  auto consider = [&](double x, double fx) {
    if (fx > best.value) {
      best.value = fx;
      best.x = x;
    }
  };
  {
    const double fb = f(b);
    ++best.evals;
    consider(b, fb);
  }
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  best.evals += 2;
  consider(c, fc);
  consider(d, fd);
  while (std::abs(b - a) > x_tol && best.evals < max_evals) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
    ++best.evals;
  }
  return best;
}

RootResult bisect_root(const std::function<double(double)>& f,
                       double lo, double hi,
                       double x_tol, int max_iters) {
  RootResult res;
  double flo = f(lo), fhi = f(hi);
  res.evals = 2;
  if (flo == 0.0) {
    res.x = lo;
    res.bracketed = true;
    return res;
  }
  if (fhi == 0.0) {
    res.x = hi;
    res.bracketed = true;
    return res;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    // No sign change: a positive derivative-like residual at both ends means
    // the stationary point lies beyond hi, a negative one below lo.
    res.x = (flo > 0.0) ? hi : lo;
    res.bracketed = false;
    return res;
  }
  double a = lo, b = hi, fa = flo;
  for (int it = 0; it < max_iters && (b - a) > x_tol; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    ++res.evals;
    if (fm == 0.0) {
      res.x = mid;
      res.bracketed = true;
      return res;
    }
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  res.x = 0.5 * (a + b);
  res.bracketed = true;
  return res;
}

}  // namespace cofrk
