#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bigjump/rng.hpp"

namespace bigjump {

// One-dimensional claim-size law. Sampling is by quantile transform so each
// draw consumes exactly one uniform; that keeps counter bookkeeping trivial
// and makes comonotone coupling exact.
enum class MarginalKind { pareto, lognormal, weibull, exponential };

struct MarginalLaw {
  MarginalKind kind = MarginalKind::pareto;
  double a = 1.0;  // pareto: alpha     lognormal: mu    weibull: shape k   exp: rate
  double b = 1.0;  // pareto: x_min     lognormal: sigma weibull: scale     exp: unused

  static MarginalLaw pareto(double alpha, double x_min = 1.0) {
    if (!(alpha > 0.0)) throw std::invalid_argument("pareto: alpha must be positive");
    if (!(x_min > 0.0)) throw std::invalid_argument("pareto: x_min must be positive");
    return {MarginalKind::pareto, alpha, x_min};
  }
  static MarginalLaw lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("lognormal: sigma must be positive");
    return {MarginalKind::lognormal, mu, sigma};
  }
  // Heavy-tailed regime is shape < 1.
  static MarginalLaw weibull(double shape, double scale) {
    if (!(shape > 0.0 && shape <= 1.0)) {
      throw std::invalid_argument("weibull: shape must lie in (0,1]");
    }
    if (!(scale > 0.0)) throw std::invalid_argument("weibull: scale must be positive");
    return {MarginalKind::weibull, shape, scale};
  }
  static MarginalLaw exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
    return {MarginalKind::exponential, rate, 0.0};
  }

  bool heavy() const {
    switch (kind) {
      case MarginalKind::pareto: return true;
      case MarginalKind::lognormal: return true;
      case MarginalKind::weibull: return a < 1.0;
      case MarginalKind::exponential: return false;
    }
    return false;
  }

  double quantile(double u) const {
    switch (kind) {
      case MarginalKind::pareto: return b * std::pow(1.0 - u, -1.0 / a);
      case MarginalKind::lognormal: return std::exp(a + b * inverse_normal_cdf(u));
      case MarginalKind::weibull: return b * std::pow(-std::log1p(-u), 1.0 / a);
      case MarginalKind::exponential: return -std::log1p(-u) / a;
    }
    return 0.0;
  }

  // P[X > x]
  double tail(double x) const {
    switch (kind) {
      case MarginalKind::pareto: return x <= b ? 1.0 : std::pow(b / x, a);
      case MarginalKind::lognormal: {
        if (x <= 0.0) return 1.0;
        return 0.5 * std::erfc((std::log(x) - a) / (b * std::sqrt(2.0)));
      }
      case MarginalKind::weibull:
        return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / b, a));
      case MarginalKind::exponential: return x <= 0.0 ? 1.0 : std::exp(-a * x);
    }
    return 0.0;
  }

  double density(double x) const {
    switch (kind) {
      case MarginalKind::pareto:
        return x < b ? 0.0 : a * std::pow(b, a) * std::pow(x, -a - 1.0);
      case MarginalKind::lognormal: {
        if (x <= 0.0) return 0.0;
        const double z = (std::log(x) - a) / b;
        return std::exp(-0.5 * z * z) / (x * b * std::sqrt(2.0 * M_PI));
      }
      case MarginalKind::weibull: {
        if (x <= 0.0) return 0.0;
        const double t = std::pow(x / b, a);
        return (a / x) * t * std::exp(-t);
      }
      case MarginalKind::exponential: return x < 0.0 ? 0.0 : a * std::exp(-a * x);
    }
    return 0.0;
  }

  // Essential infimum of the support.
  double min_support() const {
    return kind == MarginalKind::pareto ? b : 0.0;
  }

  // Law of c*X for c > 0.
  MarginalLaw scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    switch (kind) {
      case MarginalKind::pareto: return {kind, a, b * c};
      case MarginalKind::lognormal: return {kind, a + std::log(c), b};
      case MarginalKind::weibull: return {kind, a, b * c};
      case MarginalKind::exponential: return {kind, a / c, 0.0};
    }
    return *this;
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case MarginalKind::pareto: os << "pareto(" << a << "," << b << ")"; break;
      case MarginalKind::lognormal: os << "lognormal(" << a << "," << b << ")"; break;
      case MarginalKind::weibull: os << "weibull(" << a << "," << b << ")"; break;
      case MarginalKind::exponential: os << "exponential(" << a << ")"; break;
    }
    return os.str();
  }

  friend bool operator==(const MarginalLaw&, const MarginalLaw&) = default;
};

// Cross-component dependence inside one claim vector.
enum class Coupling { independent, comonotone, common_light_shock };

struct VectorLaw {
  std::vector<MarginalLaw> marginals;
  Coupling coupling = Coupling::independent;
  std::optional<MarginalLaw> shock;  // required (and exponential) for common_light_shock

  static VectorLaw iid(const MarginalLaw& m, std::size_t d) {
    VectorLaw law;
    law.marginals.assign(d, m);
    return law;
  }

  std::size_t dims() const { return marginals.size(); }

  void validate() const {
    if (marginals.empty()) throw std::invalid_argument("VectorLaw: needs at least one marginal");
    if (coupling == Coupling::common_light_shock) {
      if (!shock) throw std::invalid_argument("VectorLaw: common_light_shock needs a shock law");
      if (shock->kind != MarginalKind::exponential) {
        throw std::invalid_argument(
            "VectorLaw: the shared shock must be light-tailed (exponential)");
      }
    }
  }

  // Uniforms consumed per vector draw; fixed per law so counters are static.
  std::uint64_t uniforms_per_draw() const {
    switch (coupling) {
      case Coupling::independent: return dims();
      case Coupling::comonotone: return 1;
      case Coupling::common_light_shock: return dims() + 1;
    }
    return dims();
  }

  // Draws one vector using counters [base, base + uniforms_per_draw()).
  void draw(const CounterRng& rng, std::uint64_t base, std::span<double> out) const {
    const std::size_t d = dims();
    switch (coupling) {
      case Coupling::independent:
        for (std::size_t j = 0; j < d; ++j) {
          out[j] = marginals[j].quantile(rng.uniform(base + j));
        }
        break;
      case Coupling::comonotone: {
        const double u = rng.uniform(base);
        for (std::size_t j = 0; j < d; ++j) out[j] = marginals[j].quantile(u);
        break;
      }
      case Coupling::common_light_shock: {
        const double w = shock->quantile(rng.uniform(base + d));
        for (std::size_t j = 0; j < d; ++j) {
          out[j] = marginals[j].quantile(rng.uniform(base + j)) + w;
        }
        break;
      }
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t j = 0; j < marginals.size(); ++j) {
      if (j) os << ",";
      os << marginals[j].to_string();
    }
    os << "]";
    switch (coupling) {
      case Coupling::independent: break;
      case Coupling::comonotone: os << "+comonotone"; break;
      case Coupling::common_light_shock: os << "+shock:" << shock->to_string(); break;
    }
    return os.str();
  }
};

// Scaling factor law for product convolutions and scale mixtures. Support must
// be bounded away from 0 and infinity; that keeps every product-tail argument
// of the verifiers in the uniformly-bounded regime.
struct ThetaLaw {
  enum class Kind { degenerate, bounded_uniform };
  enum class Mode { scalar, componentwise };

  Kind kind = Kind::degenerate;
  Mode mode = Mode::scalar;
  double lo = 1.0;
  double hi = 1.0;

  static ThetaLaw degenerate(double value, Mode mode = Mode::scalar) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("theta: degenerate value must be positive and finite");
    }
    return {Kind::degenerate, mode, value, value};
  }
  static ThetaLaw bounded_uniform(double lo, double hi, Mode mode = Mode::scalar) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("theta: bounded_uniform needs 0 < lo <= hi < inf");
    }
    return {Kind::bounded_uniform, mode, lo, hi};
  }

  std::uint64_t uniforms_per_draw() const { return kind == Kind::degenerate ? 0 : 1; }

  double draw(const CounterRng& rng, std::uint64_t counter) const {
    if (kind == Kind::degenerate) return lo;
    return lo + (hi - lo) * rng.uniform(counter);
  }

  std::string to_string() const {
    std::ostringstream os;
    if (kind == Kind::degenerate) os << "degenerate(" << lo << ")";
    else os << "bounded_uniform(" << lo << "," << hi << ")";
    if (mode == Mode::componentwise) os << "+componentwise";
    return os.str();
  }
};

// Claim-count law for randomly stopped sums. All supported kinds have light
// tails, so E[(1+eps)^N] is finite for some eps > 0; heavier counting laws are
// rejected at the configuration boundary.
struct CountingLaw {
  enum class Kind { poisson, geometric, uniform_int, degenerate };

  Kind kind = Kind::degenerate;
  double p1 = 1.0;  // poisson: mean   geometric: success prob q   uniform: lo   degenerate: value
  double p2 = 0.0;  // uniform: hi

  // Mean capped so the inversion loop below stays exact.
  static CountingLaw poisson(double mean) {
    if (!(mean > 0.0) || mean > 1000.0) {
      throw std::invalid_argument("counting: poisson mean must lie in (0, 1000]");
    }
    return {Kind::poisson, mean, 0.0};
  }
  // P[N = k] = q (1-q)^k for k = 0,1,2,...
  static CountingLaw geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("counting: geometric q must lie in (0,1)");
    return {Kind::geometric, q, 0.0};
  }
  static CountingLaw uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("counting: uniform_int needs lo <= hi");
    return {Kind::uniform_int, static_cast<double>(lo), static_cast<double>(hi)};
  }
  static CountingLaw degenerate(std::uint64_t value) {
    return {Kind::degenerate, static_cast<double>(value), 0.0};
  }

  double mean() const {
    switch (kind) {
      case Kind::poisson: return p1;
      case Kind::geometric: return (1.0 - p1) / p1;
      case Kind::uniform_int: return 0.5 * (p1 + p2);
      case Kind::degenerate: return p1;
    }
    return 0.0;
  }

  void validate() const {
    if (mean() <= 0.0) {
      throw std::invalid_argument("counting: law is degenerate at zero");
    }
  }

  // One uniform per draw, inversion of the CDF.
  std::uint64_t draw(const CounterRng& rng, std::uint64_t counter) const {
    const double u = rng.uniform(counter);
    switch (kind) {
      case Kind::poisson: {
        double pk = std::exp(-p1);
        double cum = pk;
        std::uint64_t k = 0;
        while (u > cum && k < 4096) {
          ++k;
          pk *= p1 / static_cast<double>(k);
          cum += pk;
        }
        return k;
      }
      case Kind::geometric:
        return static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p1));
      case Kind::uniform_int: {
        const auto lo = static_cast<std::uint64_t>(p1);
        const auto hi = static_cast<std::uint64_t>(p2);
        const auto span = hi - lo + 1;
        auto k = lo + static_cast<std::uint64_t>(u * static_cast<double>(span));
        return k > hi ? hi : k;
      }
      case Kind::degenerate: return static_cast<std::uint64_t>(p1);
    }
    return 0;
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::poisson: os << "poisson(" << p1 << ")"; break;
      case Kind::geometric: os << "geometric(" << p1 << ")"; break;
      case Kind::uniform_int: os << "uniform_int(" << p1 << "," << p2 << ")"; break;
      case Kind::degenerate: os << "degenerate(" << p1 << ")"; break;
    }
    return os.str();
  }
};

}  // namespace bigjump
