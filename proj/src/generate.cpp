#include "hjmot/generate.hpp"

#include <random>

namespace hjmot {

std::string to_string(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::RandomMatrix: return "random_matrix";
    case GeneratorFamily::Euclidean: return "euclidean";
    case GeneratorFamily::Circle: return "circle";
  }
  throw InputError("unknown generator family");
}

GeneratorFamily generator_family_from_string(const std::string& s) {
  if (s == "random_matrix") return GeneratorFamily::RandomMatrix;
  if (s == "euclidean") return GeneratorFamily::Euclidean;
  if (s == "circle") return GeneratorFamily::Circle;
  throw InputError("unknown generator family: " + s);
}

namespace {

// Bit-stable uniform in [0,1): independent of libstdc++ distribution
// internals, so identical specs give identical instances everywhere.
Real uniform01(std::mt19937_64& rng) { return static_cast<Real>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ProblemInstance generate(const GeneratorSpec& spec) {
  if (spec.K < 1) throw InputError("K must be >= 1");
  if (static_cast<int>(spec.sizes.size()) != spec.K + 1)
    throw InputError("expected K+1 stage sizes");
  for (int s : spec.sizes)
    if (s < 1) throw InputError("stage sizes must be >= 1");
  if (spec.family == GeneratorFamily::Euclidean && spec.dimension < 1)
    throw InputError("dimension must be >= 1");
  if (!(spec.cost_scale > 0)) throw InputError("cost_scale must be positive");

  std::mt19937_64 rng(spec.seed);
  ProblemInstance inst;
  inst.K = spec.K;
  inst.allow_skips = spec.allow_skips;
  inst.spaces.resize(spec.K + 1);
  for (int k = 0; k <= spec.K; ++k) {
    StageSpace& sp = inst.spaces[k];
    sp.stage_index = k;
    for (int i = 0; i < spec.sizes[k]; ++i)
      sp.points.push_back("s" + std::to_string(k) + "p" + std::to_string(i));
  }

  switch (spec.family) {
    case GeneratorFamily::RandomMatrix: {
      inst.costs.kind = CostKind::ExplicitMatrices;
      inst.costs.matrices.resize(pair_count(spec.K));
      for (int i = 0; i < spec.K; ++i)
        for (int j = i + 1; j <= spec.K; ++j) {
          Mat C(spec.sizes[i], spec.sizes[j]);
          for (int a = 0; a < C.rows(); ++a)
            for (int b = 0; b < C.cols(); ++b) C(a, b) = spec.cost_scale * uniform01(rng);
          inst.costs.matrices[pair_index(i, j, spec.K)] = std::move(C);
        }
      break;
    }
    case GeneratorFamily::Euclidean: {
      inst.costs.kind = CostKind::SquaredEuclidean;
      for (int k = 0; k <= spec.K; ++k)
        for (int i = 0; i < spec.sizes[k]; ++i) {
          Vec x(spec.dimension);
          for (int d = 0; d < spec.dimension; ++d) x[d] = uniform01(rng);
          inst.spaces[k].coords.push_back(std::move(x));
        }
      break;
    }
    case GeneratorFamily::Circle: {
      inst.costs.kind = CostKind::SquaredCircleGeodesic;
      for (int k = 0; k <= spec.K; ++k)
        for (int i = 0; i < spec.sizes[k]; ++i)
          inst.spaces[k].angles.push_back(2.0 * M_PI * uniform01(rng));
      break;
    }
  }

  inst.mu0.stage_index = 0;
  inst.mu0.weights = Vec::Constant(spec.sizes[0], 1.0 / spec.sizes[0]);
  inst.muK.stage_index = spec.K;
  inst.muK.weights = Vec::Constant(spec.sizes[spec.K], 1.0 / spec.sizes[spec.K]);
  return inst;
}

}  // namespace hjmot
