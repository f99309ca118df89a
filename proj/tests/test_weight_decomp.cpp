#include <catch2/catch_amalgamated.hpp>

#include "shintani/polyhedra.hpp"
#include "shintani/weight_decomp.hpp"
#include "testutil.hpp"

using shintani::Error;
using shintani::ErrorKind;
using shintani::WeightInstance;

namespace {

// the worked six-coordinate, five-set example
WeightInstance reference_instance() {
  WeightInstance inst;
  inst.n = 6;
  inst.sets = {{1, 2}, {0, 3, 5}, {0, 4}, {5}, {2, 3, 4}};
  inst.sigma = {1.9, 0.6, 0.6, 0.8, 0.2, 1.4};
  return inst;
}

}  // namespace

TEST_CASE("instance validation errors carry 1-based payloads") {
  WeightInstance inst;
  inst.n = 2;
  inst.sets = {{0}, {}};
  inst.sigma = {1.0, 1.0};
  try {
    shintani::validate_instance(inst);
    FAIL("empty set accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySubset);
    CHECK(e.indices() == std::vector<int>{2});
  }

  inst.sets = {{0}, {0, 5}};
  CHECK_THROWS_AS(shintani::validate_instance(inst), Error);  // out of range
  inst.sets = {{0}, {1, 1}};
  CHECK_THROWS_AS(shintani::validate_instance(inst), Error);  // duplicate

  inst.sets = {{0}, {1}};
  inst.sigma = {1.0};
  CHECK_THROWS_AS(shintani::validate_instance(inst), Error);  // dimension

  inst.sigma = {1.0, -0.5};
  try {
    shintani::validate_instance(inst);
    FAIL("negative weight accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeEntry);
    CHECK(e.indices() == std::vector<int>{2});
  }

  inst.sigma = {1.0, 0.0};
  inst.strict = true;
  try {
    shintani::validate_instance(inst);
    FAIL("zero weight accepted in strict mode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("characteristic matrix matches the printed six-by-five example") {
  auto A = shintani::characteristic_matrix(reference_instance());
  REQUIRE(A.rows == 6);
  REQUIRE(A.cols == 5);
  std::vector<double> expected{
      0, 1, 1, 0, 0,  //
      1, 0, 0, 0, 0,  //
      1, 0, 0, 0, 1,  //
      0, 1, 0, 0, 1,  //
      0, 0, 1, 0, 1,  //
      0, 1, 0, 1, 0,  //
  };
  CHECK(A.a == expected);

  // columns round-trip to the sets
  auto sup = shintani::column_supports(A);
  for (int j = 0; j < 5; ++j) {
    std::vector<int> S;
    for (int i = 0; i < 6; ++i)
      if (sup[j].test(i)) S.push_back(i);
    CHECK(S == reference_instance().sets[j]);
  }
}

TEST_CASE("intersection graph edges require a shared coordinate") {
  auto g = shintani::IntersectionGraph::build(reference_instance().sets);
  CHECK(g.m == 5);
  CHECK(g.edge(0, 4));        // {2,3} and {3,4,5} share coordinate 3
  CHECK(g.edge(1, 2));        // share coordinate 1
  CHECK(g.edge(1, 3));        // share coordinate 6
  CHECK_FALSE(g.edge(0, 1));  // {2,3} vs {1,4,6}
  CHECK_FALSE(g.edge(0, 3));
  CHECK_FALSE(g.edge(3, 4));
  for (int u = 0; u < 5; ++u) CHECK_FALSE(g.edge(u, u));
}

TEST_CASE("hall condition on the reference instances") {
  auto hall = shintani::check_hall_condition(reference_instance());
  CHECK(hall.feasible);
  CHECK(hall.slack == Catch::Approx(0.2).margin(1e-12));

  WeightInstance single;
  single.n = 1;
  single.sets = {{0}};
  single.sigma = {1.0};
  auto h1 = shintani::check_hall_condition(single);
  CHECK(h1.feasible);
  CHECK(h1.slack == Catch::Approx(0.0).margin(1e-12));
  single.strict = true;
  CHECK_FALSE(shintani::check_hall_condition(single).feasible);  // strict needs slack

  WeightInstance pigeon;
  pigeon.n = 1;
  pigeon.sets = {{0}, {0}};
  pigeon.sigma = {1.5};
  auto h2 = shintani::check_hall_condition(pigeon);
  CHECK_FALSE(h2.feasible);
  CHECK(h2.slack == Catch::Approx(-0.5).margin(1e-12));
  CHECK(h2.violating_K == std::vector<int>{0, 1});
}

TEST_CASE("exhaustive and min-cut hall checks report the same slack") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = (trial % 2 == 0) ? testutil::random_feasible_instance(rng, 8, 6)
                                 : testutil::random_infeasible_instance(rng, 8, 6);
    auto ex = shintani::check_hall_condition(inst);
    auto mc = shintani::check_hall_condition(inst, /*force_mincut=*/true);
    CHECK(ex.feasible == mc.feasible);
    CHECK(ex.slack == Catch::Approx(mc.slack).margin(1e-9));
    if (!mc.feasible) {
      // the min-cut witness must itself violate the inequality
      REQUIRE_FALSE(mc.violating_K.empty());
      std::vector<char> in_union(inst.n, 0);
      for (int j : mc.violating_K)
        for (int i : inst.sets[j]) in_union[i] = 1;
      double w = 0.0;
      for (int i = 0; i < inst.n; ++i)
        if (in_union[i]) w += inst.sigma[i];
      CHECK(w < static_cast<double>(mc.violating_K.size()) + 1e-9);
    }
  }
}

TEST_CASE("graph decomposition handles the reference instance") {
  shintani::detail::RedistributionStats stats;
  auto inst = reference_instance();
  auto parts = shintani::decompose_graph(inst, &stats);
  CHECK(testutil::valid_decomposition(inst, parts, false));
  CHECK(stats.max_conservation_drift <= 1e-9);
}

TEST_CASE("flow decomposition handles the reference instance") {
  auto inst = reference_instance();
  CHECK(testutil::valid_decomposition(inst, shintani::decompose_flow(inst), false));
}

TEST_CASE("single-set instances echo sigma") {
  WeightInstance inst;
  inst.n = 3;
  inst.sets = {{0, 2}};
  inst.sigma = {0.7, 0.1, 0.9};
  auto parts = shintani::decompose_graph(inst);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0] == inst.sigma);
  auto flow_parts = shintani::decompose_flow(inst);
  CHECK(testutil::valid_decomposition(inst, flow_parts, false));
}

TEST_CASE("disconnected instances split by support") {
  WeightInstance inst;
  inst.n = 2;
  inst.sets = {{0}, {1}};
  inst.sigma = {1.0, 1.0};
  auto parts = shintani::decompose_graph(inst);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == std::vector<double>{1.0, 0.0});
  CHECK(parts[1] == std::vector<double>{0.0, 1.0});

  auto flow_parts = shintani::decompose_flow(inst);
  CHECK(flow_parts == parts);  // the tight solution is unique
}

TEST_CASE("strict variant keeps every entry and bound strict") {
  WeightInstance inst;
  inst.n = 2;
  inst.sets = {{0, 1}};
  inst.sigma = {0.6, 0.6};
  inst.strict = true;
  for (auto parts : {shintani::decompose_graph(inst), shintani::decompose_flow(inst)}) {
    REQUIRE(parts.size() == 1);
    CHECK(parts[0][0] + parts[0][1] == Catch::Approx(1.2));
    CHECK(parts[0][0] > 0.0);
    CHECK(parts[0][1] > 0.0);
    CHECK(testutil::valid_decomposition(inst, parts, true));
  }

  auto strict_ref = reference_instance();
  strict_ref.strict = true;
  for (auto parts :
       {shintani::decompose_graph(strict_ref), shintani::decompose_flow(strict_ref)}) {
    CHECK(testutil::valid_decomposition(strict_ref, parts, true));
  }
}

TEST_CASE("random feasible instances decompose under both constructors") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    bool strict = trial % 3 == 0;
    auto inst = testutil::random_feasible_instance(rng, 8, 6, strict);
    shintani::detail::RedistributionStats stats;
    auto g = shintani::decompose_graph(inst, &stats);
    CHECK(testutil::valid_decomposition(inst, g, strict));
    CHECK(stats.max_conservation_drift <= 1e-9);
    auto f = shintani::decompose_flow(inst);
    CHECK(testutil::valid_decomposition(inst, f, strict));
  }
}

TEST_CASE("infeasible instances are rejected with a genuine witness") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 80; ++trial) {
    auto inst = testutil::random_infeasible_instance(rng, 8, 6);
    for (int algo = 0; algo < 2; ++algo) {
      try {
        if (algo == 0)
          shintani::decompose_graph(inst);
        else
          shintani::decompose_flow(inst);
        FAIL("infeasible instance accepted");
      } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::InfeasibleInstance);
        REQUIRE_FALSE(e.indices().empty());
        std::vector<char> in_union(inst.n, 0);
        for (int j1 : e.indices()) {
          REQUIRE(j1 >= 1);
          REQUIRE(j1 <= static_cast<int>(inst.sets.size()));
          for (int i : inst.sets[j1 - 1]) in_union[i] = 1;
        }
        double w = 0.0;
        for (int i = 0; i < inst.n; ++i)
          if (in_union[i]) w += inst.sigma[i];
        CHECK(w < static_cast<double>(e.indices().size()) + 1e-9);
      }
    }
  }
}

TEST_CASE("hall condition equals polyhedron membership of the characteristic matrix") {
  std::mt19937_64 rng(37);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = (trial % 2 == 0) ? testutil::random_feasible_instance(rng, 6, 5)
                                 : testutil::random_infeasible_instance(rng, 6, 5);
    // the bridge needs every coordinate covered by some set, else the
    // characteristic matrix has a zero row
    auto A = shintani::characteristic_matrix(inst);
    bool covered = true;
    for (int i = 0; i < A.rows && covered; ++i) {
      bool any = false;
      for (int j = 0; j < A.cols; ++j) any = any || A.at(i, j) > 0.0;
      covered = any;
    }
    if (!covered) continue;
    auto hall = shintani::check_hall_condition(inst);
    if (std::abs(hall.slack) < 1e-7) continue;  // stay off the tolerance boundary
    std::vector<int> all(A.cols);
    for (int j = 0; j < A.cols; ++j) all[j] = j;
    CHECK(hall.feasible == shintani::membership_flow(A, all, inst.sigma, false));
    ++compared;
  }
  CHECK(compared > 20);
}

TEST_CASE("decomposition matches hall feasibility across a mixed batch") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 120; ++trial) {
    auto inst = (trial % 2 == 0) ? testutil::random_feasible_instance(rng, 7, 5)
                                 : testutil::random_infeasible_instance(rng, 7, 5);
    bool hall_ok = shintani::check_hall_condition(inst).feasible;
    bool flow_ok = true;
    try {
      shintani::decompose_flow(inst);
    } catch (const Error&) {
      flow_ok = false;
    }
    bool graph_ok = true;
    try {
      shintani::decompose_graph(inst);
    } catch (const Error&) {
      graph_ok = false;
    }
    CHECK(hall_ok == flow_ok);
    CHECK(flow_ok == graph_ok);
  }
}
