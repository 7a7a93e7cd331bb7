#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace wmod {

/// Row-stochastic, nonnegative influence matrix. Entry (i, j) is the weight
/// node i assigns to the opinion of node j. Instances only come out of
/// validate_and_normalize(), so every live object satisfies the invariants.
class InfluenceMatrix {
 public:
  int n() const noexcept { return n_; }
  double operator()(int i, int j) const { return w_[index(i, j)]; }
  std::span<const double> row(int i) const {
    return {w_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }
  /// Out-neighbours of i, i.e. every j with w_ij > 0 (may include i).
  std::vector<int> out_neighbors(int i) const;
  std::vector<std::vector<double>> rows() const;

  friend bool operator==(const InfluenceMatrix&, const InfluenceMatrix&) = default;

 private:
  friend InfluenceMatrix validate_and_normalize(const std::vector<std::vector<double>>& raw);

  InfluenceMatrix(int n, std::vector<double> w) : n_(n), w_(std::move(w)) {}
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> w_;
};

/// Row sums within this distance of 1 are kept verbatim.
inline constexpr double kRowSumTolerance = 1e-12;

/// Checks a raw nonnegative square matrix and divides each row by its sum.
/// Rows that already sum to 1 (within kRowSumTolerance) are left untouched so
/// that hand-written exact ties such as (0.5, 0.5) survive.
/// Throws NonSquare, NegativeEntry, NonFiniteEntry or ZeroRow.
InfluenceMatrix validate_and_normalize(const std::vector<std::vector<double>>& raw);

enum class GraphModel { ErdosRenyi, WattsStrogatz };

struct GraphGenConfig {
  GraphModel model = GraphModel::ErdosRenyi;
  int n = 10;
  double p = 0.5;  // link probability (ER) or rewiring probability (WS)
  int mean_out_degree = 4;  // WS only
  std::uint64_t seed = 0;
};

void validate(const GraphGenConfig& cfg);

/// Directed random network with independent uniform (0, 1] edge weights,
/// row-normalized. Nodes left without out-links get a self-loop of weight 1.
InfluenceMatrix gen_network(const GraphGenConfig& cfg);

std::string to_string(GraphModel model);
GraphModel parse_graph_model(const std::string& name);

/// Dense CSV (one row per line, no header) or, for *.json paths, the wrapper
/// {"n":..,"weights":[[..]],"meta":{..}}. Loaded values go through
/// validate_and_normalize().
InfluenceMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const InfluenceMatrix& m, const std::filesystem::path& path,
                 const nlohmann::json& meta = nlohmann::json::object());

InfluenceMatrix parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const InfluenceMatrix& m);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace wmod
