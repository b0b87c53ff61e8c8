#pragma once

#include "hjmot/instance.hpp"

namespace hjmot {

enum class GeneratorFamily { RandomMatrix, Euclidean, Circle };

std::string to_string(GeneratorFamily family);
GeneratorFamily generator_family_from_string(const std::string& s);

struct GeneratorSpec {
  GeneratorFamily family = GeneratorFamily::RandomMatrix;
  int K = 2;
  std::vector<int> sizes;  // K+1 entries, each >= 1
  uint64_t seed = 0;
  Real cost_scale = 1.0;
  int dimension = 1;  // euclidean only
  bool allow_skips = true;
};

// Deterministic instance generation: identical specs produce identical
// instances.  random_matrix draws i.i.d. uniform [0, cost_scale] entries
// for every stage pair; euclidean samples points uniformly in [0,1]^d
// with squared-distance costs; circle samples angles uniformly in
// [0, 2*pi) with squared-geodesic costs.  Endpoint measures are uniform.
ProblemInstance generate(const GeneratorSpec& spec);

}  // namespace hjmot
