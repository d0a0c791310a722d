#include "ctrace/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace ctrace {

namespace {

void check_variables(const std::vector<VariableSpec>& variables) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("Dag: variable ids must be 0..n-1 in order");
    }
    if (variables[i].cardinality < 2) {
      throw std::invalid_argument("Dag: variable " + std::to_string(i) +
                                  " has cardinality < 2");
    }
  }
}

void check_edges(std::vector<Edge>& edges, int n) {
  for (const auto& [p, c] : edges) {
    if (p < 0 || p >= n || c < 0 || c >= n) {
      throw std::invalid_argument("Dag: edge endpoint out of range");
    }
    if (p == c) throw std::invalid_argument("Dag: self-loop on " + std::to_string(p));
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("Dag: duplicate edge");
  }
}

}  // namespace

Dag::Dag(std::vector<VariableSpec> variables, std::vector<Edge> edges)
    : variables_(std::move(variables)), edges_(std::move(edges)) {
  check_variables(variables_);
  const int n = static_cast<int>(variables_.size());
  check_edges(edges_, n);

  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (const auto& [p, c] : edges_) {
    ++indegree[c];
    children[p].push_back(c);
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("Dag: graph contains a directed cycle");
  }
  build(std::move(order));
}

Dag::Dag(std::vector<VariableSpec> variables, std::vector<Edge> edges,
         std::vector<int> topo_order)
    : variables_(std::move(variables)), edges_(std::move(edges)) {
  check_variables(variables_);
  const int n = static_cast<int>(variables_.size());
  check_edges(edges_, n);
  if (static_cast<int>(topo_order.size()) != n) {
    throw std::invalid_argument("Dag: topological order has the wrong length");
  }
  std::vector<int> position(n, -1);
  for (int k = 0; k < n; ++k) {
    const int v = topo_order[k];
    if (v < 0 || v >= n || position[v] != -1) {
      throw std::invalid_argument("Dag: topological order is not a permutation");
    }
    position[v] = k;
  }
  for (const auto& [p, c] : edges_) {
    if (position[p] >= position[c]) {
      throw std::invalid_argument("Dag: edge " + std::to_string(p) + "->" +
                                  std::to_string(c) +
                                  " violates the topological order");
    }
  }
  build(std::move(topo_order));
}

void Dag::build(std::vector<int> topo_order) {
  const std::size_t n = variables_.size();
  topo_order_ = std::move(topo_order);
  parents_.assign(n, {});
  for (const auto& [p, c] : edges_) parents_[c].push_back(p);

  strides_.assign(n, {});
  num_configs_.assign(n, 1);
  for (std::size_t v = 0; v < n; ++v) {
    auto& ps = parents_[v];
    std::sort(ps.begin(), ps.end());
    strides_[v].resize(ps.size());
    std::size_t stride = 1;
    for (std::size_t k = ps.size(); k-- > 0;) {
      strides_[v][k] = stride;
      const auto card = static_cast<std::size_t>(variables_[ps[k]].cardinality);
      if (stride > std::numeric_limits<std::size_t>::max() / card) {
        throw std::invalid_argument("Dag: parent configuration count overflows");
      }
      stride *= card;
    }
    num_configs_[v] = stride;
  }
}

Dag random_dag(int m, int e, int cardinality, Seed seed) {
  if (m < 2) throw std::invalid_argument("random_dag: need at least 2 nodes");
  if (e < 1) throw std::invalid_argument("random_dag: edge density must be >= 1");
  if (cardinality < 2) throw std::invalid_argument("random_dag: cardinality must be >= 2");
  const auto pairs = static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2;
  const auto wanted = static_cast<std::size_t>(m) * static_cast<std::size_t>(e);
  if (wanted > pairs) {
    throw std::invalid_argument("random_dag: " + std::to_string(wanted) +
                                " edges requested but only " + std::to_string(pairs) +
                                " forward pairs exist for " + std::to_string(m) +
                                " nodes");
  }

  Rng rng(seed);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  // Forward pairs (a, b), a < b, as positions in the ordering.
  std::vector<std::pair<int, int>> forward;
  forward.reserve(pairs);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) forward.emplace_back(a, b);
  }
  // Partial Fisher-Yates: the first `wanted` slots are a uniform subset.
  for (std::size_t i = 0; i < wanted; ++i) {
    std::swap(forward[i], forward[i + rng.below(pairs - i)]);
  }

  std::vector<Edge> edges;
  edges.reserve(wanted);
  for (std::size_t i = 0; i < wanted; ++i) {
    edges.emplace_back(order[forward[i].first], order[forward[i].second]);
  }
  std::vector<VariableSpec> variables;
  for (int v = 0; v < m; ++v) variables.push_back({v, cardinality});
  return Dag(std::move(variables), std::move(edges), std::move(order));
}

std::uint64_t complexity(const Dag& g) {
  std::uint64_t total = 0;
  for (const auto& v : g.variables()) {
    total += g.num_parent_configurations(v.id) *
             static_cast<std::uint64_t>(v.cardinality - 1);
  }
  return total;
}

std::vector<std::vector<int>> parent_configurations(const Dag& g, int x) {
  if (x < 0 || x >= static_cast<int>(g.size())) {
    throw std::out_of_range("parent_configurations: unknown variable " +
                            std::to_string(x));
  }
  const auto& ps = g.parents(x);
  std::vector<std::vector<int>> configs;
  configs.reserve(g.num_parent_configurations(x));
  std::vector<int> current(ps.size(), 0);
  while (true) {
    configs.push_back(current);
    // Odometer increment, last parent fastest.
    std::size_t k = ps.size();
    while (k > 0) {
      --k;
      if (++current[k] < g.cardinality(ps[k])) break;
      current[k] = 0;
      if (k == 0) return configs;
    }
    if (ps.empty()) return configs;
  }
}

}  // namespace ctrace
