#include "wmod/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wmod/error.hpp"
#include "wmod/rng.hpp"

namespace wmod {

std::vector<int> InfluenceMatrix::out_neighbors(int i) const {
  std::vector<int> out;
  const auto r = row(i);
  for (int j = 0; j < n_; ++j) {
    if (r[j] > 0.0) out.push_back(j);
  }
  return out;
}

std::vector<std::vector<double>> InfluenceMatrix::rows() const {
  std::vector<std::vector<double>> out(n_);
  for (int i = 0; i < n_; ++i) {
    const auto r = row(i);
    out[i].assign(r.begin(), r.end());
  }
  return out;
}

InfluenceMatrix validate_and_normalize(const std::vector<std::vector<double>>& raw) {
  const auto n = raw.size();
  if (n == 0) throw Error(ErrorKind::NonSquare, "matrix has no rows");
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].size() != n) {
      throw Error(ErrorKind::NonSquare, "row " + std::to_string(i) + " has " +
                                            std::to_string(raw[i].size()) + " entries, expected " +
                                            std::to_string(n));
    }
  }
  std::vector<double> w;
  w.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = raw[i][j];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NonFiniteEntry,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
      }
      if (v < 0.0) {
        throw Error(ErrorKind::NegativeEntry,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
      }
      sum += v;
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i) + " sums to zero");
    const bool keep = std::abs(sum - 1.0) <= kRowSumTolerance;
    for (std::size_t j = 0; j < n; ++j) w.push_back(keep ? raw[i][j] : raw[i][j] / sum);
  }
  return InfluenceMatrix(static_cast<int>(n), std::move(w));
}

std::string to_string(GraphModel model) {
  return model == GraphModel::ErdosRenyi ? "er" : "ws";
}

GraphModel parse_graph_model(const std::string& name) {
  if (name == "er" || name == "ER" || name == "erdos-renyi") return GraphModel::ErdosRenyi;
  if (name == "ws" || name == "WS" || name == "watts-strogatz") return GraphModel::WattsStrogatz;
  throw Error(ErrorKind::ConfigInvalid, "unknown graph model '" + name + "'");
}

void validate(const GraphGenConfig& cfg) {
  if (cfg.n < 1) throw Error(ErrorKind::ConfigInvalid, "n must be positive");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw Error(ErrorKind::ConfigInvalid, "p must lie in [0,1]");
  if (cfg.model == GraphModel::WattsStrogatz) {
    if (cfg.mean_out_degree <= 0 || cfg.mean_out_degree % 2 != 0) {
      throw Error(ErrorKind::ConfigInvalid, "mean_out_degree must be an even positive integer");
    }
    if (cfg.mean_out_degree >= cfg.n) {
      throw Error(ErrorKind::ConfigInvalid, "mean_out_degree must be smaller than n");
    }
  }
}

namespace {

std::vector<std::vector<int>> erdos_renyi_targets(int n, double p, Rng& rng) {
  std::vector<std::vector<int>> targets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && rng.bernoulli(p)) targets[i].push_back(j);
    }
  }
  return targets;
}

std::vector<std::vector<int>> watts_strogatz_targets(int n, int degree, double p, Rng& rng) {
  std::vector<std::vector<int>> targets(n);
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= degree / 2; ++d) {
      targets[i].push_back((i + d) % n);
      targets[i].push_back((i - d + n) % n);
    }
  }
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    auto& out = targets[i];
    for (auto& target : out) {
      if (!rng.bernoulli(p)) continue;
      candidates.clear();
      for (int j = 0; j < n; ++j) {
        if (j != i && std::find(out.begin(), out.end(), j) == out.end()) candidates.push_back(j);
      }
      if (candidates.empty()) continue;
      target = candidates[rng.below(candidates.size())];
    }
  }
  return targets;
}

}  // namespace

InfluenceMatrix gen_network(const GraphGenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const int n = cfg.n;
  const auto targets = cfg.model == GraphModel::ErdosRenyi
                           ? erdos_renyi_targets(n, cfg.p, rng)
                           : watts_strogatz_targets(n, cfg.mean_out_degree, cfg.p, rng);
  std::vector<std::vector<double>> raw(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    if (targets[i].empty()) {
      raw[i][i] = 1.0;
      continue;
    }
    for (int j : targets[i]) raw[i][j] = rng.uniform_open_closed();
  }
  return validate_and_normalize(raw);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_matrix_csv(const InfluenceMatrix& m) {
  std::string out;
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

InfluenceMatrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> raw;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    std::size_t column = 0;
    while (true) {
      ++column;
      const auto comma = rest.find(',');
      const auto field = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw Error(ErrorKind::ParseError,
                    location(line_no, column) + ": cannot parse '" + std::string(field) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!raw.empty() && row.size() != raw.front().size()) {
      throw Error(ErrorKind::ParseError, location(line_no, row.size()) + ": row has " +
                                             std::to_string(row.size()) + " fields, expected " +
                                             std::to_string(raw.front().size()));
    }
    raw.push_back(std::move(row));
  }
  if (raw.empty()) throw Error(ErrorKind::ParseError, "no matrix rows found");
  return validate_and_normalize(raw);
}

namespace {

InfluenceMatrix parse_matrix_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("weights") || !doc["weights"].is_array()) {
    throw Error(ErrorKind::ParseError, "JSON matrix needs a \"weights\" array");
  }
  std::vector<std::vector<double>> raw;
  std::size_t r = 0;
  for (const auto& row : doc["weights"]) {
    ++r;
    if (!row.is_array()) throw Error(ErrorKind::ParseError, "weights row " + std::to_string(r) + " is not an array");
    std::vector<double> values;
    std::size_t c = 0;
    for (const auto& v : row) {
      ++c;
      if (!v.is_number()) throw Error(ErrorKind::ParseError, location(r, c) + ": not a number");
      values.push_back(v.get<double>());
    }
    raw.push_back(std::move(values));
  }
  if (doc.contains("n") && doc["n"].get<std::size_t>() != raw.size()) {
    throw Error(ErrorKind::ParseError, "\"n\" does not match the number of weight rows");
  }
  return validate_and_normalize(raw);
}

bool is_json_path(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

InfluenceMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (is_json_path(path) || (first != std::string::npos && text[first] == '{')) {
    return parse_matrix_json(text);
  }
  return parse_matrix_csv(text);
}

void save_matrix(const InfluenceMatrix& m, const std::filesystem::path& path,
                 const nlohmann::json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  if (is_json_path(path)) {
    nlohmann::json doc;
    doc["n"] = m.n();
    doc["weights"] = m.rows();
    doc["meta"] = meta;
    out << doc.dump(2) << '\n';
  } else {
    out << format_matrix_csv(m);
  }
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace wmod
