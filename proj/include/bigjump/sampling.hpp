#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bigjump/geometry.hpp"
#include "bigjump/laws.hpp"
#include "bigjump/parallel.hpp"
#include "bigjump/rng.hpp"

namespace bigjump {

// A reproducible block of d-dimensional samples with (optionally) their
// scalarizations. Regenerating with the same SeedSpec gives identical bits.
struct SampleBatch {
  std::size_t dims = 0;
  std::size_t count = 0;
  std::vector<double> vectors;  // row-major, dims*count; may be empty if y-only
  std::vector<double> y;        // Y_A per sample when a set was supplied
  SeedSpec seed;
  std::string law_tag;
};

inline SampleBatch draw_vectors(const VectorLaw& law, std::size_t n, const SeedSpec& seed,
                                unsigned workers = 0, const RuinSet* set = nullptr) {
  law.validate();
  if (n == 0) throw std::invalid_argument("draw_vectors: need n >= 1");
  if (set && set->dims() != law.dims()) {
    throw std::invalid_argument("draw_vectors: set/law dimension mismatch");
  }
  SampleBatch batch;
  batch.dims = law.dims();
  batch.count = n;
  batch.seed = seed;
  batch.law_tag = law.to_string();
  batch.vectors.resize(n * batch.dims);
  if (set) batch.y.resize(n);

  const CounterRng rng(seed);
  const std::uint64_t stride = law.uniforms_per_draw();
  map_chunks<int>(n, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      std::span<double> out(batch.vectors.data() + i * batch.dims, batch.dims);
      law.draw(rng, i * stride, out);
      if (set) batch.y[i] = set->scalarize(out);
    }
    return 0;
  });
  return batch;
}

// Y_A values only; avoids materializing the vectors for large n.
inline std::vector<double> draw_scalarized(const VectorLaw& law, const RuinSet& set,
                                           std::size_t n, const SeedSpec& seed,
                                           unsigned workers = 0) {
  law.validate();
  if (set.dims() != law.dims()) {
    throw std::invalid_argument("draw_scalarized: set/law dimension mismatch");
  }
  std::vector<double> y(n);
  const CounterRng rng(seed);
  const std::uint64_t stride = law.uniforms_per_draw();
  map_chunks<int>(n, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> scratch(set.dims());
    for (std::uint64_t i = begin; i < end; ++i) {
      law.draw(rng, i * stride, scratch);
      y[i] = set.scalarize(scratch);
    }
    return 0;
  });
  return y;
}

// Dependence across the summands of one tuple.
enum class SequenceStructure { independent, qai_common_shock, comonotone_duplicate };

inline SequenceStructure sequence_structure_from_string(const std::string& s) {
  if (s == "independent") return SequenceStructure::independent;
  if (s == "qai_common_shock") return SequenceStructure::qai_common_shock;
  if (s == "comonotone") return SequenceStructure::comonotone_duplicate;
  throw std::invalid_argument("unknown dependence structure: " + s);
}

// Draws one tuple of n_summands vectors into out (n_summands * dims doubles)
// using counters [base, base + sequence_stride(...)). qai_common_shock adds a
// single shared exponential vector W to every summand: joint exceedances of
// the scalarizations are then asymptotically driven by the independent heavy
// parts, while the checkers in the verifier module test that property
// empirically instead of trusting the construction.
inline std::uint64_t sequence_stride(const VectorLaw& law, SequenceStructure structure,
                                     std::uint64_t n_summands) {
  switch (structure) {
    case SequenceStructure::independent: return n_summands * law.uniforms_per_draw();
    case SequenceStructure::qai_common_shock:
      return n_summands * law.uniforms_per_draw() + law.dims();
    case SequenceStructure::comonotone_duplicate: return law.uniforms_per_draw();
  }
  return 0;
}

inline void draw_sequence_into(const VectorLaw& law, SequenceStructure structure,
                               const std::optional<MarginalLaw>& shock,
                               std::uint64_t n_summands, const CounterRng& rng,
                               std::uint64_t base, std::span<double> out) {
  const std::size_t d = law.dims();
  const std::uint64_t stride = law.uniforms_per_draw();
  switch (structure) {
    case SequenceStructure::independent:
      for (std::uint64_t i = 0; i < n_summands; ++i) {
        law.draw(rng, base + i * stride, out.subspan(i * d, d));
      }
      break;
    case SequenceStructure::qai_common_shock: {
      if (!shock) {
        throw std::invalid_argument("qai_common_shock: shock law required");
      }
      if (shock->kind != MarginalKind::exponential) {
        throw std::invalid_argument(
            "qai_common_shock: a heavy-tailed shock would break asymptotic "
            "independence of the scalarizations; only exponential is accepted");
      }
      const std::uint64_t wbase = base + n_summands * stride;
      for (std::uint64_t i = 0; i < n_summands; ++i) {
        law.draw(rng, base + i * stride, out.subspan(i * d, d));
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double w = shock->quantile(rng.uniform(wbase + j));
        for (std::uint64_t i = 0; i < n_summands; ++i) out[i * d + j] += w;
      }
      break;
    }
    case SequenceStructure::comonotone_duplicate: {
      law.draw(rng, base, out.subspan(0, d));
      for (std::uint64_t i = 1; i < n_summands; ++i) {
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = out[j];
      }
      break;
    }
  }
}

// One tuple per call; chunk_index selects the tuple.
inline std::vector<std::vector<double>> draw_dependent_sequence(
    const VectorLaw& law, std::uint64_t n_summands, SequenceStructure structure,
    const std::optional<MarginalLaw>& shock, const SeedSpec& seed) {
  law.validate();
  if (n_summands == 0) throw std::invalid_argument("draw_dependent_sequence: need n >= 1");
  const CounterRng rng(seed);
  std::vector<double> flat(n_summands * law.dims());
  draw_sequence_into(law, structure, shock, n_summands, rng, 0, flat);
  std::vector<std::vector<double>> result(n_summands);
  for (std::uint64_t i = 0; i < n_summands; ++i) {
    result[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * law.dims()),
                     flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * law.dims()));
  }
  return result;
}

inline std::vector<double> draw_theta(const ThetaLaw& theta, std::size_t n,
                                      const SeedSpec& seed, unsigned workers = 0) {
  if (n == 0) throw std::invalid_argument("draw_theta: need n >= 1");
  std::vector<double> out(n);
  const CounterRng rng(seed);
  map_chunks<int>(n, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) out[i] = theta.draw(rng, i);
    return 0;
  });
  return out;
}

}  // namespace bigjump
