#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "wmod/error.hpp"
#include "wmod/net.hpp"

using namespace wmod;

namespace {

const std::vector<std::vector<double>> kThreeNode{{0.4, 0.2, 0.4}, {0, 1, 0}, {0.3, 0.3, 0.4}};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected wmod::Error");
  return ErrorKind::IoError;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wmod_test_" + name);
}

}  // namespace

TEST_CASE("validate_and_normalize") {
  SUBCASE("single node") {
    const auto m = validate_and_normalize({{1.0}});
    CHECK(m.n() == 1);
    CHECK(m(0, 0) == 1.0);
  }
  SUBCASE("already stochastic rows are kept verbatim") {
    const auto m = validate_and_normalize(kThreeNode);
    CHECK(m.rows() == kThreeNode);
  }
  SUBCASE("rows are divided by their sums") {
    const auto m = validate_and_normalize({{2, 2}, {1, 3}});
    CHECK(m.rows() == std::vector<std::vector<double>>{{0.5, 0.5}, {0.25, 0.75}});
  }
  SUBCASE("errors") {
    CHECK(kind_of([] { validate_and_normalize({{1, 0}}); }) == ErrorKind::NonSquare);
    CHECK(kind_of([] { validate_and_normalize({}); }) == ErrorKind::NonSquare);
    CHECK(kind_of([] { validate_and_normalize({{1, -0.1}, {0, 1}}); }) == ErrorKind::NegativeEntry);
    CHECK(kind_of([] { validate_and_normalize({{1, 0}, {0, 0}}); }) == ErrorKind::ZeroRow);
    CHECK(kind_of([] { validate_and_normalize({{1, NAN}, {0, 1}}); }) == ErrorKind::NonFiniteEntry);
  }
}

TEST_CASE("gen_network edge cases") {
  SUBCASE("ER with p=0 gives self-loops only") {
    const auto m = gen_network({GraphModel::ErdosRenyi, 2, 0.0, 0, 3});
    CHECK(m.rows() == std::vector<std::vector<double>>{{1, 0}, {0, 1}});
  }
  SUBCASE("ER with p=1 is complete without self-loops") {
    const auto m = gen_network({GraphModel::ErdosRenyi, 5, 1.0, 0, 7});
    for (int i = 0; i < 5; ++i) {
      CHECK(m(i, i) == 0.0);
      CHECK(m.out_neighbors(i).size() == 4);
    }
  }
  SUBCASE("same seed, same matrix") {
    const GraphGenConfig cfg{GraphModel::ErdosRenyi, 5, 1.0, 0, 7};
    CHECK(gen_network(cfg) == gen_network(cfg));
    const GraphGenConfig ws{GraphModel::WattsStrogatz, 20, 0.4, 4, 11};
    CHECK(gen_network(ws) == gen_network(ws));
    CHECK_FALSE(gen_network(ws) == gen_network({GraphModel::WattsStrogatz, 20, 0.4, 4, 12}));
  }
  SUBCASE("WS lattice keeps the exact out-degree") {
    const auto m = gen_network({GraphModel::WattsStrogatz, 30, 0.0, 6, 5});
    for (int i = 0; i < 30; ++i) {
      const auto nb = m.out_neighbors(i);
      CHECK(nb.size() == 6);
      for (int j : nb) {
        const int d = std::min((j - i + 30) % 30, (i - j + 30) % 30);
        CHECK(d >= 1);
        CHECK(d <= 3);
      }
    }
  }
  SUBCASE("WS rewiring keeps out-degree and avoids self-loops") {
    const auto m = gen_network({GraphModel::WattsStrogatz, 15, 1.0, 4, 5});
    for (int i = 0; i < 15; ++i) {
      CHECK(m.out_neighbors(i).size() == 4);
      CHECK(m(i, i) == 0.0);
    }
  }
  SUBCASE("invalid configurations") {
    CHECK(kind_of([] { gen_network({GraphModel::ErdosRenyi, 0, 0.5, 0, 0}); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { gen_network({GraphModel::ErdosRenyi, 4, 1.5, 0, 0}); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { gen_network({GraphModel::WattsStrogatz, 4, 0.5, 3, 0}); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { gen_network({GraphModel::WattsStrogatz, 4, 0.5, 4, 0}); }) == ErrorKind::ConfigInvalid);
  }
}

TEST_CASE("generated matrices are row-stochastic (1000 configs)") {
  Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    GraphGenConfig cfg;
    cfg.model = rng.bernoulli(0.5) ? GraphModel::ErdosRenyi : GraphModel::WattsStrogatz;
    cfg.n = 3 + static_cast<int>(rng.below(20));
    cfg.p = rng.uniform01();
    cfg.mean_out_degree = 2 * (1 + static_cast<int>(rng.below(static_cast<std::uint64_t>((cfg.n - 1) / 2))));
    cfg.seed = rng.next();
    const auto m = gen_network(cfg);
    for (int i = 0; i < m.n(); ++i) {
      double sum = 0.0;
      for (double v : m.row(i)) {
        REQUIRE(v >= 0.0);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("matrix files") {
  const auto m = validate_and_normalize(kThreeNode);
  SUBCASE("CSV round trip") {
    const auto path = temp_path("three.csv");
    save_matrix(m, path);
    CHECK(load_matrix(path) == m);
  }
  SUBCASE("JSON round trip with full precision") {
    Rng rng(9);
    const auto r = oracle::random_matrix(rng, 7, 0.5);
    const auto path = temp_path("random.json");
    save_matrix(r, path, {{"seed", 9}});
    CHECK(load_matrix(path) == r);
    const auto csv = temp_path("random.csv");
    save_matrix(r, csv);
    CHECK(load_matrix(csv) == r);
  }
  SUBCASE("malformed row length") {
    try {
      parse_matrix_csv("0.5,0.5\n1\n");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("unparsable field reports its location") {
    try {
      parse_matrix_csv("0.5,0.5\n0.5,abc\n");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("line 2, column 2") != std::string::npos);
    }
  }
  SUBCASE("negative entry in a file") {
    CHECK(kind_of([] { parse_matrix_csv("0.5,0.5\n-1,2\n"); }) == ErrorKind::NegativeEntry);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([] { load_matrix("/nonexistent/matrix.csv"); }) == ErrorKind::IoError);
  }
}
