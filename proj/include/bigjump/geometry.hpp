#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bigjump {

// A ruin set A = union of half-spaces {x : p^T x > 1} over a finite direction
// set of nonnegative vectors p. Such a set is open, increasing, has a convex
// complement and excludes a neighbourhood of the origin. Immutable after
// construction, safe to share across workers.
class RuinSet {
 public:
  // G = {x : sum_i w_i x_i > c} with w >= 0, sum w = 1, c > 0.
  static RuinSet halfspace(std::vector<double> weights, double threshold,
                           std::string label = "halfspace") {
    if (weights.empty()) throw std::invalid_argument("halfspace: empty weight vector");
    if (!(threshold > 0.0)) throw std::invalid_argument("halfspace: threshold must be positive");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("halfspace: weights must be nonnegative");
      sum += w;
    }
    if (sum == 0.0) throw std::invalid_argument("halfspace: zero weight vector");
    if (std::fabs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("halfspace: weights must sum to 1");
    }
    for (double& w : weights) w /= threshold;
    const std::size_t d = weights.size();
    return RuinSet(d, {std::move(weights)}, std::move(label));
  }

  // {x : x_i > b_i for SOME i}: one scaled coordinate direction per axis.
  static RuinSet any_exceed(const std::vector<double>& barriers,
                            std::string label = "any_exceed") {
    if (barriers.empty()) throw std::invalid_argument("any_exceed: empty barrier vector");
    const std::size_t d = barriers.size();
    std::vector<std::vector<double>> dirs;
    dirs.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!(barriers[i] > 0.0)) {
        throw std::invalid_argument("any_exceed: barriers must be positive");
      }
      std::vector<double> p(d, 0.0);
      p[i] = 1.0 / barriers[i];
      dirs.push_back(std::move(p));
    }
    return RuinSet(d, std::move(dirs), std::move(label));
  }

  // {x : x_i > b_i for ALL i}. Only valid in one dimension, where it
  // degenerates to a half-line. For d >= 2 the complement is not convex, so
  // the set falls outside the supported family and construction is refused.
  static RuinSet all_exceed(const std::vector<double>& barriers,
                            std::string label = "all_exceed") {
    if (barriers.empty()) throw std::invalid_argument("all_exceed: empty barrier vector");
    if (barriers.size() >= 2) {
      throw std::invalid_argument(
          "all_exceed: the set {x : x_i > b_i for all i} with d >= 2 has a "
          "non-convex complement and is not an admissible ruin set; use "
          "any_exceed or halfspace instead");
    }
    if (!(barriers[0] > 0.0)) {
      throw std::invalid_argument("all_exceed: barriers must be positive");
    }
    return RuinSet(1, {{1.0 / barriers[0]}}, std::move(label));
  }

  std::size_t dims() const { return dims_; }
  std::size_t direction_count() const { return flat_.size() / dims_; }
  const std::string& label() const { return label_; }

  std::vector<double> direction(std::size_t i) const {
    return {flat_.begin() + static_cast<std::ptrdiff_t>(i * dims_),
            flat_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dims_)};
  }

  // Y_A(x) = sup{u : x in uA} = max_p p^T x. Nonnegative for x >= 0.
  double scalarize(std::span<const double> x) const {
    check_dims(x.size());
    double best = 0.0;
    const double* p = flat_.data();
    for (std::size_t k = 0; k < flat_.size(); k += dims_) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dims_; ++j) dot += p[k + j] * x[j];
      best = std::max(best, dot);
    }
    return best;
  }

  // x in uA holds iff Y_A(x) > u; the boundary is excluded (A is open).
  bool member(std::span<const double> x, double u) const {
    if (!(u > 0.0)) throw std::invalid_argument("member: scale u must be positive");
    return scalarize(x) > u;
  }

  // Y_A of the shifted point, max(0, max_p p^T (x - a)); encodes membership
  // in uA + a via Y > u. Negative intermediate coordinates are fine.
  double scalarize_shifted(std::span<const double> x, std::span<const double> shift) const {
    check_dims(x.size());
    check_dims(shift.size());
    double best = 0.0;
    const double* p = flat_.data();
    for (std::size_t k = 0; k < flat_.size(); k += dims_) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dims_; ++j) dot += p[k + j] * (x[j] - shift[j]);
      best = std::max(best, dot);
    }
    return best;
  }

  // u1 = max_p |p^T a|; for u > u1 the sandwich
  // (u+u1)A subset uA + a subset (u-u1)A holds.
  double shift_radius(std::span<const double> a) const {
    check_dims(a.size());
    double best = 0.0;
    const double* p = flat_.data();
    for (std::size_t k = 0; k < flat_.size(); k += dims_) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dims_; ++j) dot += p[k + j] * a[j];
      best = std::max(best, std::fabs(dot));
    }
    return best;
  }

 private:
  RuinSet(std::size_t dims, std::vector<std::vector<double>> dirs, std::string label)
      : dims_(dims), label_(std::move(label)) {
    if (dirs.empty()) throw std::invalid_argument("RuinSet: no directions");
    for (const auto& p : dirs) {
      if (p.size() != dims_) throw std::invalid_argument("RuinSet: direction dimension mismatch");
      bool any_positive = false;
      for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw std::invalid_argument("RuinSet: direction components must be finite and >= 0");
        }
        any_positive |= v > 0.0;
      }
      if (!any_positive) throw std::invalid_argument("RuinSet: zero direction vector");
    }
    // Exact-duplicate removal, then drop componentwise-dominated directions;
    // the max in Y_A is always achieved on a dominating vector.
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());
    std::vector<std::vector<double>> kept;
    for (const auto& p : dirs) {
      bool dominated = false;
      for (const auto& q : dirs) {
        if (&p == &q || p == q) continue;
        bool le = true;
        for (std::size_t j = 0; j < dims_; ++j) le &= p[j] <= q[j];
        if (le) { dominated = true; break; }
      }
      if (!dominated) kept.push_back(p);
    }
    flat_.reserve(kept.size() * dims_);
    for (const auto& p : kept) flat_.insert(flat_.end(), p.begin(), p.end());
  }

  void check_dims(std::size_t n) const {
    if (n != dims_) throw std::invalid_argument("RuinSet: point dimension mismatch");
  }

  std::size_t dims_;
  std::vector<double> flat_;  // row-major directions
  std::string label_;
};

}  // namespace bigjump
