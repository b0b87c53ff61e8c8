#include "hjmot/path_cost.hpp"

#include "hjmot/lp_oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace hjmot;
using namespace hjmot::testing;

TEST_CASE("active indices") {
  Path skip_all({0, kSkip, 0});
  ActiveIndices a = active_indices(skip_all, 2);
  CHECK(a.n == 2);
  CHECK(a.indices == std::vector<int>{0, 2});

  Path full({0, 0, 0});
  a = active_indices(full, 2);
  CHECK(a.n == 3);
  CHECK(a.indices == std::vector<int>{0, 1, 2});

  Path mixed({0, kSkip, 0, kSkip, 0});
  a = active_indices(mixed, 4);
  CHECK(a.n == 3);
  CHECK(a.indices == std::vector<int>{0, 2, 4});
}

TEST_CASE("extract returns points at active stages") {
  ProblemInstance inst = tiny1();
  auto pairs = extract(Path({0, kSkip, 0}), inst);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::make_pair(0, 0));
  CHECK(pairs[1] == std::make_pair(2, 0));

  pairs = extract(Path({0, 0, 0}), inst);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1] == std::make_pair(1, 0));

  ProblemInstance k3 = line_instance({{0.0}, {1.0}, {2.0}, {3.0}});
  pairs = extract(Path({0, kSkip, kSkip, 0}), k3);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1] == std::make_pair(3, 0));
}

TEST_CASE("path cost on the line fixture") {
  ProblemInstance inst = tiny1();
  CostFamily realized = realize_costs(inst);
  CHECK(path_cost(Path({0, kSkip, 0}), inst, realized) == doctest::Approx(1.0));
  CHECK(path_cost(Path({0, 0, 0}), inst, realized) == doctest::Approx(0.52));
  CHECK(path_cost(Path({0, 1, 0}), inst, realized) == doctest::Approx(181.0));
}

TEST_CASE("maximum adjacent cost on the line fixture") {
  ProblemInstance inst = tiny1();
  CostFamily realized = realize_costs(inst);
  CHECK(max_adjacent_cost(0, 0, kSkip, inst, realized) == doctest::Approx(1.0));
  CHECK(max_adjacent_cost(0, 0, 0, inst, realized) == doctest::Approx(0.16));
  CHECK(max_adjacent_cost(1, kSkip, 0, inst, realized) == 0.0);
}

TEST_CASE("chain bound on the line fixture paths") {
  ProblemInstance inst = tiny1();
  CostFamily realized = realize_costs(inst);

  ChainBound cb = chain_bound(Path({0, kSkip, 0}), inst, realized);
  CHECK(cb.path_value == doctest::Approx(1.0));
  CHECK(cb.tilde_sum == doctest::Approx(1.0));
  CHECK(cb.holds);

  cb = chain_bound(Path({0, 0, 0}), inst, realized);
  CHECK(cb.path_value == doctest::Approx(0.52));
  CHECK(cb.tilde_sum == doctest::Approx(0.52));
  CHECK(cb.holds);

  cb = chain_bound(Path({0, 1, 0}), inst, realized);
  CHECK(cb.path_value == doctest::Approx(181.0));
  CHECK(cb.holds);
}

TEST_CASE("chain bound holds exhaustively on random instances") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    ProblemInstance inst = random_instance(seed, 4, 3);
    CostFamily realized = realize_costs(inst);
    for (const Path& p : enumerate_path_space(inst, 1e5))
      CHECK(chain_bound(p, inst, realized).holds);
  }
}

TEST_CASE("without skips the path cost is the classical chain sum") {
  for (uint64_t seed = 21; seed <= 26; ++seed) {
    ProblemInstance inst = random_instance(seed, 4, 3, /*allow_skips=*/false);
    CostFamily realized = realize_costs(inst);
    for (const Path& p : enumerate_path_space(inst, 1e5)) {
      Real chain = 0;
      for (int i = 0; i < inst.K; ++i)
        chain += realized.matrices[pair_index(i, i + 1, inst.K)](p.choices[i], p.choices[i + 1]);
      CHECK(path_cost(p, inst, realized) == chain);
    }
  }
}

TEST_CASE("active indices are strictly increasing") {
  for (uint64_t seed = 31; seed <= 36; ++seed) {
    ProblemInstance inst = random_instance(seed, 5, 3);
    for (const Path& p : enumerate_path_space(inst, 1e5)) {
      ActiveIndices act = active_indices(p, inst.K);
      for (size_t i = 0; i + 1 < act.indices.size(); ++i)
        CHECK(act.indices[i] < act.indices[i + 1]);
    }
  }
}
