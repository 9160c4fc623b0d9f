#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace bigjump {

struct BinomialCi {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact Clopper-Pearson interval for a binomial proportion. Chosen over the
// normal approximation because deep-tail exceedance counts are small.
inline BinomialCi clopper_pearson(std::uint64_t k, std::uint64_t n, double level = 0.95) {
  if (n == 0) throw std::invalid_argument("clopper_pearson: n must be positive");
  if (k > n) throw std::invalid_argument("clopper_pearson: k must not exceed n");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("clopper_pearson: level must lie in (0,1)");
  }
  const double alpha = 1.0 - level;
  BinomialCi ci;
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  ci.lo = (k == 0) ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
  ci.hi = (k == n) ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
  return ci;
}

// Empirical tail of a scalar sample: exceedance probabilities, order-statistic
// quantiles and exact binomial confidence intervals, all over one sorted copy
// of the data. Read-only after construction.
class TailEstimate {
 public:
  explicit TailEstimate(std::vector<double> values, bool sorted = false)
      : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("TailEstimate: empty sample");
    if (!sorted) std::sort(values_.begin(), values_.end());
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& sorted_values() const { return values_; }
  double max_value() const { return values_.back(); }

  // #{values strictly greater than x}
  std::uint64_t count_above(double x) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<std::uint64_t>(values_.end() - it);
  }

  // P_hat[Y > x]
  double eval(double x) const {
    return static_cast<double>(count_above(x)) / static_cast<double>(values_.size());
  }

  BinomialCi ci(double x, double level = 0.95) const {
    return clopper_pearson(count_above(x), values_.size(), level);
  }

  // Order-statistic quantile, q in [0,1].
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0,1]");
    if (values_.size() == 1) return values_[0];
    const double pos = q * static_cast<double>(values_.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values_.size()) return values_.back();
    const double frac = pos - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
  }

 private:
  std::vector<double> values_;  // ascending
};

// Strictly increasing threshold grid at the requested quantile levels.
inline std::vector<double> quantile_grid(const TailEstimate& t,
                                         const std::vector<double>& levels) {
  std::vector<double> grid;
  grid.reserve(levels.size());
  for (double q : levels) {
    const double x = t.quantile(q);
    if (grid.empty() || x > grid.back()) grid.push_back(x);
  }
  return grid;
}

inline const std::vector<double>& default_levels() {
  static const std::vector<double> levels{0.90, 0.99, 0.999, 0.9999};
  return levels;
}

}  // namespace bigjump
