#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "bigjump/geometry.hpp"
#include "bigjump/laws.hpp"

namespace bigjump {

// Deterministic quadrature route for convolution tails of independent
// marginals. Built and tested before the Monte Carlo verifiers so every
// simulated exceedance estimate has an implementation-independent check.

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth = 40) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace detail

// P[X1 + X2 > s] for independent marginals, by conditioning on X1:
//   integral over t of f1(t) * tail2(s - t), plus the region where X1 alone
//   already pushes the sum past s.
inline double conv2_tail(const MarginalLaw& m1, const MarginalLaw& m2, double s,
                         double rel_tol = 1e-6) {
  const double lo1 = m1.min_support();
  const double lo2 = m2.min_support();
  if (s <= lo1 + lo2) return 1.0;
  const double t_star = s - lo2;  // beyond this X1 value the sum exceeds s surely
  const double head = m1.tail(t_star);
  auto integrand = [&](double t) { return m1.density(t) * m2.tail(s - t); };
  // Scale the absolute tolerance by a cheap lower bound of the result so the
  // relative target holds even deep in the tail.
  const double rough = std::max({head, m1.tail(s) + m2.tail(s), 1e-300});
  const double body =
      detail::adaptive_simpson(integrand, lo1, t_star, rel_tol * rough * 0.5);
  return head + body;
}

// P[X_1 + ... + X_n > s] for iid marginals, by recursive conditioning.
inline double iid_sum_tail(const MarginalLaw& m, unsigned n, double s,
                           double rel_tol = 1e-6) {
  if (n == 0) throw std::invalid_argument("iid_sum_tail: need n >= 1");
  if (n == 1) return m.tail(s);
  if (n == 2) return conv2_tail(m, m, s, rel_tol);
  const double lo = m.min_support();
  if (s <= static_cast<double>(n) * lo) return 1.0;
  const double rest_lo = static_cast<double>(n - 1) * lo;
  const double t_star = s - rest_lo;
  const double head = m.tail(t_star);
  // Looser inner tolerance: the outer integral averages inner errors away.
  auto integrand = [&](double t) { return m.density(t) * iid_sum_tail(m, n - 1, s - t, rel_tol * 4.0); };
  const double rough = std::max(head, static_cast<double>(n) * m.tail(s));
  const double body = detail::adaptive_simpson(integrand, lo, t_star, rel_tol * rough * 0.5);
  return head + body;
}

// P[Y_A > x] for a single-direction (halfspace) set over a d=2 vector with
// independent marginals: Y = p1 X1 + p2 X2, so the answer is a scaled
// pairwise convolution tail. Degenerate directions fall back to one marginal.
inline double halfspace_tail_oracle(const RuinSet& set, const VectorLaw& law, double x,
                                    double rel_tol = 1e-6) {
  if (set.direction_count() != 1) {
    throw std::invalid_argument("halfspace_tail_oracle: set must be a single halfspace");
  }
  if (law.coupling != Coupling::independent) {
    throw std::invalid_argument("halfspace_tail_oracle: needs independent components");
  }
  const std::vector<double> p = set.direction(0);
  std::vector<MarginalLaw> active;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) active.push_back(law.marginals[j].scaled(p[j]));
  }
  if (active.size() == 1) return active[0].tail(x);
  if (active.size() == 2) return conv2_tail(active[0], active[1], x, rel_tol);
  throw std::invalid_argument("halfspace_tail_oracle: supports at most two active components");
}

}  // namespace bigjump
