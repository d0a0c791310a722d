#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ctrace/rng.hpp"

namespace ctrace {

// A categorical variable with states 0 .. cardinality - 1.
struct VariableSpec {
  int id = 0;
  int cardinality = 2;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

// (parent, child)
using Edge = std::pair<int, int>;

// Directed acyclic graph over variables with ids 0 .. n-1. Immutable once
// built. Parent lists are sorted by id; a parent configuration is indexed
// lexicographically with the last (highest id) parent varying fastest.
class Dag {
 public:
  // Topological order computed by Kahn's algorithm (lowest ready id first).
  Dag(std::vector<VariableSpec> variables, std::vector<Edge> edges);
  // Explicit order; every edge must point forward in it.
  Dag(std::vector<VariableSpec> variables, std::vector<Edge> edges,
      std::vector<int> topo_order);

  std::size_t size() const { return variables_.size(); }
  const std::vector<VariableSpec>& variables() const { return variables_; }
  int cardinality(int id) const { return variables_.at(id).cardinality; }
  // Sorted by (parent, child).
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& topo_order() const { return topo_order_; }
  const std::vector<int>& parents(int id) const { return parents_.at(id); }

  std::size_t num_parent_configurations(int id) const {
    return num_configs_.at(id);
  }
  // Row index of the parent configuration found in a full assignment.
  std::size_t parent_configuration_index(int id,
                                         std::span<const int> assignment) const {
    std::size_t row = 0;
    const auto& ps = parents_[id];
    const auto& st = strides_[id];
    for (std::size_t k = 0; k < ps.size(); ++k) {
      row += static_cast<std::size_t>(assignment[ps[k]]) * st[k];
    }
    return row;
  }

  // Structural equality; the topological order is not compared.
  bool same_structure(const Dag& other) const {
    return variables_ == other.variables_ && edges_ == other.edges_;
  }

 private:
  void build(std::vector<int> topo_order);

  std::vector<VariableSpec> variables_;
  std::vector<Edge> edges_;
  std::vector<int> topo_order_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::size_t> num_configs_;
};

// m nodes and exactly m*e edges: a uniform node ordering, then m*e forward
// pairs drawn uniformly without replacement. Throws std::invalid_argument
// if m < 2, e < 1, cardinality < 2 or m*e > m(m-1)/2.
Dag random_dag(int m, int e, int cardinality, Seed seed);

// Number of free parameters: sum over X of |supp(Pa_X)| * (|supp(X)| - 1).
std::uint64_t complexity(const Dag& g);

// Parent states of every configuration in row order. Orphans yield one
// empty tuple.
std::vector<std::vector<int>> parent_configurations(const Dag& g, int x);

}  // namespace ctrace
