#include <doctest.h>

#include <bit>

#include "oracles.hpp"
#include "wmod/control.hpp"
#include "wmod/error.hpp"

using namespace wmod;

namespace {

const InfluenceMatrix kThreeNode =
    validate_and_normalize({{0.4, 0.2, 0.4}, {0, 1, 0}, {0.3, 0.3, 0.4}});

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected wmod::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("pinning_feasible") {
  const auto report = enumerate_minimal_cohesive(kThreeNode);
  auto r = pinning_feasible(NodeSet{1}, report);
  CHECK_FALSE(r.feasible);
  REQUIRE(r.witness);
  CHECK(*r.witness == NodeSet{0, 2});
  r = pinning_feasible(NodeSet{1, 2}, report);
  CHECK(r.feasible);
  CHECK_FALSE(r.witness);
  CHECK(pinning_feasible(NodeSet::all(3), report).feasible);

  auto truncated = report;
  truncated.complete = false;
  CHECK(kind_of([&] { pinning_feasible(NodeSet{1}, truncated); }) == ErrorKind::IncompleteReport);
  CHECK(kind_of([&] { minimal_pinning_set(truncated); }) == ErrorKind::IncompleteReport);
}

TEST_CASE("minimal_pinning_set examples") {
  auto s = minimal_pinning_set(enumerate_minimal_cohesive(kThreeNode));
  CHECK(s.size == 2);
  CHECK(s.certified_optimal);
  CHECK(s.pinned.contains(1));

  const double third = 1.0 / 3.0;
  s = minimal_pinning_set(enumerate_minimal_cohesive(validate_and_normalize(
      {{third, third, third}, {third, third, third}, {third, third, third}})));
  CHECK(s.size == 2);

  s = minimal_pinning_set(enumerate_minimal_cohesive(validate_and_normalize({{1.0}})));
  CHECK(s.size == 1);
  CHECK(s.pinned == NodeSet{0});
}

TEST_CASE("minimal_pinning_set matches exhaustive search") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const auto w = trial % 4 == 0 ? oracle::dyadic_matrix(rng, n)
                                  : oracle::random_matrix(rng, n, rng.uniform(0.05, 0.8), 0.6);
    const auto report = enumerate_minimal_cohesive(w);
    const auto s = minimal_pinning_set(report);
    REQUIRE(s.certified_optimal);
    REQUIRE(s.size == s.pinned.size());
    REQUIRE(static_cast<int>(s.size) == oracle::min_hitting_size(w));
    REQUIRE(pinning_feasible(s.pinned, report).feasible);
  }
}

TEST_CASE("hitting-set budget") {
  // A dense graph has many overlapping minimal sets; a budget of one node
  // still returns a valid cover.
  std::vector<std::vector<double>> raw(12, std::vector<double>(12, 0.0));
  Rng rng(7);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) raw[i][j] = rng.uniform_open_closed();
  }
  const auto report = enumerate_minimal_cohesive(validate_and_normalize(raw));
  const auto s = minimal_pinning_set(report, 1);
  CHECK(pinning_feasible(s.pinned, report).feasible);
  const auto exact = minimal_pinning_set(report);
  CHECK(exact.certified_optimal);
  CHECK(exact.size <= s.size);
}

TEST_CASE("simulation agrees with the feasibility test") {
  const auto feasible = PinningConfig::uniform(3, NodeSet{1, 2}, 0.5, 0.0);
  SimulationCheckOptions opts;
  opts.t_max = 200;
  CHECK(verify_pinning_by_simulation(kThreeNode, feasible, 20, 1e-4, opts) == 1.0);

  const auto infeasible = PinningConfig::uniform(3, NodeSet{1}, 0.5, 0.0);
  CHECK_FALSE(reaches_target(kThreeNode, infeasible, std::vector<double>{1, 1, 1}, 1e-4, opts));

  const auto all = PinningConfig::uniform(3, NodeSet::all(3), 1.0, 2.0);
  CHECK(verify_pinning_by_simulation(kThreeNode, all, 5, 1e-4, opts) == 1.0);

  CHECK(kind_of([&] { verify_pinning_by_simulation(kThreeNode, all, 0, 1e-4); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("an unpinned cohesive set holds its value") {
  Rng rng(55);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto w = oracle::random_matrix(rng, n, 0.5);
    const auto report = enumerate_minimal_cohesive(w);
    if (report.minimal_cohesive_sets.size() < 2) continue;
    // Pin everything outside the first minimal set.
    const auto missed = report.minimal_cohesive_sets.front();
    const auto pinned = missed.complement(n);
    if (pinned.empty()) continue;
    const auto cfg = PinningConfig::uniform(n, pinned, 0.7, -1.0);
    REQUIRE_FALSE(pinning_feasible(pinned, report).feasible);
    SimulationCheckOptions opts;
    opts.t_max = 100;
    REQUIRE_FALSE(reaches_target(w, cfg, std::vector<double>(n, 0.0), 1e-4, opts));
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("adding pins keeps a feasible set feasible") {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(9));
    const auto report = enumerate_minimal_cohesive(oracle::random_matrix(rng, n, 0.4));
    const auto base = minimal_pinning_set(report).pinned;
    std::vector<int> more(base.begin(), base.end());
    more.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    REQUIRE(pinning_feasible(NodeSet(more), report).feasible);
    if (base.size() > 1) {
      // Dropping a pin from an optimal set must break feasibility.
      std::vector<int> fewer(base.begin() + 1, base.end());
      REQUIRE_FALSE(pinning_feasible(NodeSet(fewer), report).feasible);
    }
  }
}
