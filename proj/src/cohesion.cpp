#include "wmod/cohesion.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "wmod/error.hpp"

namespace wmod {

// ---------------------------------------------------------------- NodeSet

NodeSet::NodeSet(std::initializer_list<int> members) : NodeSet(std::vector<int>(members)) {}

NodeSet::NodeSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.front() < 0) {
    throw Error(ErrorKind::InvalidNode, "negative node index");
  }
}

NodeSet NodeSet::all(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[i] = i;
  return NodeSet(std::move(m));
}

NodeSet NodeSet::from_mask(std::uint64_t mask) {
  std::vector<int> m;
  while (mask) {
    m.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  NodeSet s;
  s.members_ = std::move(m);
  return s;
}

std::uint64_t NodeSet::mask() const {
  std::uint64_t bits = 0;
  for (int i : members_) {
    if (i >= 64) throw Error(ErrorKind::TooManyNodes, "node " + std::to_string(i) + " does not fit a 64-bit mask");
    bits |= std::uint64_t{1} << i;
  }
  return bits;
}

bool NodeSet::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

bool NodeSet::intersects(const NodeSet& other) const {
  auto a = members_.begin();
  auto b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

NodeSet NodeSet::complement(int n) const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  NodeSet s;
  s.members_ = std::move(out);
  return s;
}

NodeSet NodeSet::united(const NodeSet& other) const {
  std::vector<int> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(out));
  NodeSet s;
  s.members_ = std::move(out);
  return s;
}

std::strong_ordering operator<=>(const NodeSet& a, const NodeSet& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.members_ <=> b.members_;
}

// -------------------------------------------------------------- predicates

namespace {

void check_members(const NodeSet& m, const InfluenceMatrix& w) {
  if (m.empty()) throw Error(ErrorKind::EmptySet, "cohesion is undefined for the empty set");
  if (m.members().back() >= w.n()) {
    throw Error(ErrorKind::InvalidNode, "node " + std::to_string(m.members().back()) +
                                            " out of range for n=" + std::to_string(w.n()));
  }
}

bool cohesive_unchecked(const NodeSet& m, const InfluenceMatrix& w) {
  for (int i : m) {
    if (weight_into(w, i, m) < 0.5) return false;
  }
  return true;
}

}  // namespace

double weight_into(const InfluenceMatrix& w, int i, const NodeSet& m) {
  const auto row = w.row(i);
  double sum = 0.0;
  for (int j : m) sum += row[j];
  return sum;
}

double weight_into(const InfluenceMatrix& w, int i, std::uint64_t mask) {
  const auto row = w.row(i);
  double sum = 0.0;
  while (mask) {
    sum += row[std::countr_zero(mask)];
    mask &= mask - 1;
  }
  return sum;
}

bool is_cohesive(const NodeSet& m, const InfluenceMatrix& w) {
  check_members(m, w);
  return cohesive_unchecked(m, w);
}

bool is_maximal_cohesive(const NodeSet& m, const InfluenceMatrix& w) {
  if (!is_cohesive(m, w)) throw Error(ErrorKind::NotCohesive, "set is not cohesive");
  for (int i = 0; i < w.n(); ++i) {
    if (!m.contains(i) && weight_into(w, i, m) > 0.5) return false;
  }
  return true;
}

NodeSet cohesive_closure(const NodeSet& m, const InfluenceMatrix& w) {
  if (!is_cohesive(m, w)) throw Error(ErrorKind::NotCohesive, "set is not cohesive");
  NodeSet current = m;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 0; i < w.n(); ++i) {
      if (!current.contains(i) && weight_into(w, i, current) > 0.5) {
        current = current.united(NodeSet{i});
        grew = true;
      }
    }
  }
  return current;
}

// ------------------------------------------------------------- enumeration

namespace {

std::uint64_t closure_mask(const InfluenceMatrix& w, std::uint64_t set) {
  const int n = w.n();
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (!(set & bit) && weight_into(w, i, set) > 0.5) {
        set |= bit;
        grew = true;
      }
    }
  }
  return set;
}

// Every cohesive set containing S and avoiding E is reached by picking a
// member of S that is still short of 1/2 and branching on which of its
// available out-neighbours joins next (earlier choices are excluded in later
// branches, so no set is produced twice). Leaves are cohesive sets; the
// minimal ones among them are exactly the minimal cohesive sets.
class MinimalCohesiveSearch {
 public:
  MinimalCohesiveSearch(const InfluenceMatrix& w, std::uint64_t limit)
      : w_(w), n_(w.n()), limit_(limit), neighbors_(w.n()), order_(w.n()) {
    full_ = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (w(i, j) > 0.0) {
          neighbors_[i] |= std::uint64_t{1} << j;
          order_[i].push_back(j);
        }
      }
      std::stable_sort(order_[i].begin(), order_[i].end(),
                       [&](int a, int b) { return w(i, a) > w(i, b); });
    }
  }

  void run() {
    for (int v = 0; v < n_ && !stopped_; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      visit(bit, bit - 1);
    }
  }

  bool stopped() const { return stopped_; }
  std::uint64_t explored() const { return explored_; }
  const std::vector<std::uint64_t>& leaves() const { return leaves_; }

 private:
  void visit(std::uint64_t set, std::uint64_t excluded) {
    if (stopped_) return;
    if (++explored_ > limit_) {
      stopped_ = true;
      return;
    }
    for (std::uint64_t leaf : leaves_) {
      if ((leaf & ~set) == 0) return;  // anything below strictly contains a cohesive set
    }
    const std::uint64_t available = full_ & ~excluded;
    int pick = -1;
    int pick_count = std::numeric_limits<int>::max();
    for (std::uint64_t rest = set; rest; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      if (weight_into(w_, i, set) >= 0.5) continue;
      if (weight_into(w_, i, available) < 0.5) return;
      const int count = std::popcount(neighbors_[i] & available & ~set);
      if (count < pick_count) {
        pick = i;
        pick_count = count;
      }
    }
    if (pick < 0) {
      leaves_.push_back(set);
      return;
    }
    std::uint64_t branch_excluded = excluded;
    for (int c : order_[pick]) {
      const std::uint64_t bit = std::uint64_t{1} << c;
      if ((set & bit) || (excluded & bit)) continue;
      visit(set | bit, branch_excluded);
      if (stopped_) return;
      branch_excluded |= bit;
    }
  }

  const InfluenceMatrix& w_;
  int n_;
  std::uint64_t limit_;
  std::uint64_t full_ = 0;
  std::vector<std::uint64_t> neighbors_;
  std::vector<std::vector<int>> order_;
  std::vector<std::uint64_t> leaves_;
  std::uint64_t explored_ = 0;
  bool stopped_ = false;
};

}  // namespace

CohesionReport enumerate_minimal_cohesive(const InfluenceMatrix& w,
                                          std::optional<std::uint64_t> limit) {
  if (w.n() > 64) {
    throw Error(ErrorKind::TooManyNodes, "cohesive-set enumeration supports at most 64 nodes");
  }
  MinimalCohesiveSearch search(w, limit.value_or(std::numeric_limits<std::uint64_t>::max()));
  search.run();

  auto leaves = search.leaves();
  std::sort(leaves.begin(), leaves.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  std::vector<std::uint64_t> minimal;
  for (std::uint64_t leaf : leaves) {
    const bool has_subset = std::any_of(minimal.begin(), minimal.end(), [&](std::uint64_t m) {
      return (m & ~leaf) == 0;
    });
    if (!has_subset) minimal.push_back(leaf);
  }

  CohesionReport report;
  report.n = w.n();
  report.complete = !search.stopped();
  report.explored = search.explored();
  const std::uint64_t full = NodeSet::all(w.n()).mask();
  report.only_global_maximal = std::all_of(minimal.begin(), minimal.end(), [&](std::uint64_t m) {
    return closure_mask(w, m) == full;
  });
  for (std::uint64_t m : minimal) report.minimal_cohesive_sets.push_back(NodeSet::from_mask(m));
  std::sort(report.minimal_cohesive_sets.begin(), report.minimal_cohesive_sets.end());
  return report;
}

// ---------------------------------------------------------- decisive links

bool DecisiveGraph::has_edge(int i, int j) const {
  const auto& s = successors.at(i);
  return std::binary_search(s.begin(), s.end(), j);
}

std::size_t DecisiveGraph::edge_count() const {
  std::size_t count = 0;
  for (const auto& s : successors) count += s.size();
  return count;
}

namespace {

std::vector<double> subset_sums(const std::vector<double>& weights) {
  const std::size_t d = weights.size();
  std::vector<double> sums(std::size_t{1} << d, 0.0);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    const int top = std::bit_width(mask) - 1;
    sums[mask] = sums[mask ^ (std::size_t{1} << top)] + weights[top];
  }
  return sums;
}

// Is there a subset of `others` whose weight lies strictly inside (lo, hi)?
bool window_hit_exhaustive(const std::vector<double>& others, double lo, double hi) {
  for (double s : subset_sums(others)) {
    if (s > lo && s < hi) return true;
  }
  return false;
}

bool window_hit_split(const std::vector<double>& others, double lo, double hi) {
  const std::size_t half = others.size() / 2;
  const std::vector<double> left(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<double> right(others.begin() + static_cast<std::ptrdiff_t>(half), others.end());
  auto left_sums = subset_sums(left);
  std::sort(left_sums.begin(), left_sums.end());
  for (double b : subset_sums(right)) {
    const auto it = std::partition_point(left_sums.begin(), left_sums.end(),
                                         [&](double a) { return a + b <= lo; });
    if (it != left_sums.end() && *it + b < hi) return true;
  }
  return false;
}

}  // namespace

DecisiveGraph decisive_links(const InfluenceMatrix& w) {
  DecisiveGraph g;
  g.n = w.n();
  g.successors.resize(w.n());
  for (int i = 0; i < w.n(); ++i) {
    const auto nbrs = w.out_neighbors(i);
    const int degree = static_cast<int>(nbrs.size());
    if (degree > kMaxDecisiveDegree) {
      throw Error(ErrorKind::DegreeTooLarge, "node " + std::to_string(i) + " has out-degree " +
                                                 std::to_string(degree));
    }
    std::vector<double> others;
    for (int j : nbrs) {
      others.clear();
      for (int k : nbrs) {
        if (k != j) others.push_back(w(i, k));
      }
      const double lo = 0.5 - w(i, j);
      const bool decisive = degree <= 20 ? window_hit_exhaustive(others, lo, 0.5)
                                         : window_hit_split(others, lo, 0.5);
      if (decisive) g.successors[i].push_back(j);
    }
  }
  return g;
}

// ------------------------------------------------------------ reachability

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& successors) {
  // Iterative Tarjan.
  const int n = static_cast<int>(successors.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;

  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.node;
      if (f.next < successors[v].size()) {
        const int u = successors[v][f.next++];
        if (index[u] == -1) {
          index[u] = low[u] = counter++;
          stack.push_back(u);
          on_stack[u] = true;
          frames.push_back({u, 0});
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], index[u]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> component;
        int u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = false;
          component.push_back(u);
        } while (u != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return components;
}

std::vector<NodeSet> sink_components(const DecisiveGraph& g) {
  const auto components = strongly_connected_components(g.successors);
  std::vector<int> component_of(g.n, -1);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (int v : components[c]) component_of[v] = static_cast<int>(c);
  }
  std::vector<NodeSet> sinks;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool leaves = false;
    for (int v : components[c]) {
      for (int u : g.successors[v]) {
        if (component_of[u] != static_cast<int>(c)) leaves = true;
      }
    }
    if (!leaves) sinks.emplace_back(components[c]);
  }
  std::sort(sinks.begin(), sinks.end());
  return sinks;
}

bool has_globally_reachable_node(const DecisiveGraph& g) { return sink_components(g).size() == 1; }

NodeSet globally_reachable_nodes(const DecisiveGraph& g) {
  auto sinks = sink_components(g);
  return sinks.size() == 1 ? sinks.front() : NodeSet{};
}

}  // namespace wmod
