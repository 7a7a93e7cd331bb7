#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "wmod/net.hpp"

namespace wmod {

/// Sorted, duplicate-free set of 0-based node indices.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(std::initializer_list<int> members);
  explicit NodeSet(std::vector<int> members);

  static NodeSet all(int n);
  static NodeSet from_mask(std::uint64_t mask);

  /// Bit i set iff node i is a member. Throws TooManyNodes for members >= 64.
  std::uint64_t mask() const;

  const std::vector<int>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(int i) const;
  bool intersects(const NodeSet& other) const;
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  /// Complement within {0..n-1}.
  NodeSet complement(int n) const;
  NodeSet united(const NodeSet& other) const;

  friend bool operator==(const NodeSet&, const NodeSet&) = default;
  /// Orders by cardinality, then lexicographically.
  friend std::strong_ordering operator<=>(const NodeSet& a, const NodeSet& b);

 private:
  std::vector<int> members_;
};

/// Sum of w_ij over j in M, accumulated in increasing j. Every cohesion
/// predicate goes through this so that the same set always sees the same sum.
double weight_into(const InfluenceMatrix& w, int i, const NodeSet& m);
double weight_into(const InfluenceMatrix& w, int i, std::uint64_t mask);

/// Every member places at least 1/2 of its weight inside M. Throws EmptySet.
bool is_cohesive(const NodeSet& m, const InfluenceMatrix& w);

/// No outsider places strictly more than 1/2 inside M. Throws NotCohesive
/// when M is not cohesive to begin with.
bool is_maximal_cohesive(const NodeSet& m, const InfluenceMatrix& w);

/// Smallest maximal cohesive superset of a cohesive M, obtained by adding
/// outsiders that place more than 1/2 inside until none is left.
NodeSet cohesive_closure(const NodeSet& m, const InfluenceMatrix& w);

struct CohesionReport {
  int n = 0;
  /// Inclusion-minimal cohesive sets, ordered by size then lexicographically.
  std::vector<NodeSet> minimal_cohesive_sets;
  /// V is the only maximal cohesive set.
  bool only_global_maximal = false;
  /// False when the search budget ran out before the search finished.
  bool complete = true;
  std::uint64_t explored = 0;
};

/// Exact enumeration of the minimal cohesive sets for n <= 64 (practical up
/// to roughly n = 25 on dense graphs). `limit` caps the number of search
/// nodes; when it is hit the report is returned with complete = false.
CohesionReport enumerate_minimal_cohesive(const InfluenceMatrix& w,
                                          std::optional<std::uint64_t> limit = std::nullopt);

struct DecisiveGraph {
  int n = 0;
  /// successors[i] lists j (ascending) such that (i, j) is decisive.
  std::vector<std::vector<int>> successors;

  bool has_edge(int i, int j) const;
  std::size_t edge_count() const;
};

inline constexpr int kMaxDecisiveDegree = 25;

/// Link (i, j) with w_ij > 0 is decisive when some subset of i's other
/// out-neighbours has total weight in (1/2 - w_ij, 1/2). Exhaustive subset
/// search up to out-degree 20, meet-in-the-middle from 21 to 25; larger
/// degrees throw DegreeTooLarge.
DecisiveGraph decisive_links(const InfluenceMatrix& w);

/// Strongly connected components, each sorted, listed in reverse topological
/// order of the condensation (sinks first).
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& successors);

/// Components of the condensation without outgoing edges.
std::vector<NodeSet> sink_components(const DecisiveGraph& g);

/// True iff the condensation has exactly one sink; its members are the
/// globally reachable nodes.
bool has_globally_reachable_node(const DecisiveGraph& g);
NodeSet globally_reachable_nodes(const DecisiveGraph& g);

}  // namespace wmod
