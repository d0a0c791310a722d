#pragma once

// Shared fixtures, generators and reference computations for the tests.
// The reference computations deliberately avoid the library's own indexing
// and counting helpers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "ctrace/bayesnet.hpp"
#include "ctrace/credalnet.hpp"
#include "ctrace/graph.hpp"
#include "ctrace/rng.hpp"

namespace test {

using namespace ctrace;

inline Dag make_dag(int n, std::vector<Edge> edges, int cardinality = 2) {
  std::vector<VariableSpec> vars;
  for (int i = 0; i < n; ++i) vars.push_back({i, cardinality});
  return Dag(std::move(vars), std::move(edges));
}

inline Dag make_dag(std::vector<int> cardinalities, std::vector<Edge> edges) {
  std::vector<VariableSpec> vars;
  for (int i = 0; i < static_cast<int>(cardinalities.size()); ++i) {
    vars.push_back({i, cardinalities[i]});
  }
  return Dag(std::move(vars), std::move(edges));
}

inline Population make_population(const std::vector<std::vector<int>>& rows) {
  std::vector<int> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Population(rows.empty() ? 0 : rows.front().size(), std::move(flat));
}

// Builds a BayesNet from explicit rows, one list of rows per variable.
inline BayesNet make_bn(const Dag& g, const std::vector<std::vector<std::vector<double>>>& rows) {
  std::vector<Cpt> cpts;
  for (const auto& v : g.variables()) {
    Cpt cpt{v.id, v.cardinality, {}};
    for (const auto& r : rows[v.id]) cpt.table.insert(cpt.table.end(), r.begin(), r.end());
    cpts.push_back(std::move(cpt));
  }
  return BayesNet(g, std::move(cpts));
}

// Phi(x) written independently of the library.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Upper-tail quantile by bisection on normal_cdf.
inline double normal_upper_quantile(double s) {
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Every joint assignment of the variables of g, first variable slowest.
inline std::vector<std::vector<int>> all_assignments(const Dag& g) {
  std::vector<std::vector<int>> out;
  std::vector<int> x(g.size(), 0);
  while (true) {
    out.push_back(x);
    int i = static_cast<int>(g.size()) - 1;
    while (i >= 0 && ++x[i] == g.cardinality(i)) x[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

// Row of variable v selected by x, found by searching the enumerated parent
// configurations rather than by stride arithmetic.
inline std::size_t row_by_search(const Dag& g, int v, const std::vector<int>& x) {
  const auto configs = parent_configurations(g, v);
  std::vector<int> wanted;
  for (int p : g.parents(v)) wanted.push_back(x[p]);
  const auto it = std::find(configs.begin(), configs.end(), wanted);
  return static_cast<std::size_t>(it - configs.begin());
}

// Product of the CPT factors of x, no floor.
inline double joint_probability(const BayesNet& bn, const std::vector<int>& x) {
  double p = 1.0;
  for (const auto& v : bn.dag().variables()) {
    p *= bn.cpt(v.id).row(row_by_search(bn.dag(), v.id, x))[x[v.id]];
  }
  return p;
}

// Counts of (parent states, state) for variable v, tallied row by row.
inline std::map<std::pair<std::vector<int>, int>, int> tally(const Dag& g, const Population& d,
                                                             int v) {
  std::map<std::pair<std::vector<int>, int>, int> counts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    std::vector<int> pa;
    for (int p : g.parents(v)) pa.push_back(r[p]);
    ++counts[{pa, r[v]}];
  }
  return counts;
}

// Directed cycle detection by DFS with colours.
inline bool has_cycle(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> out(n);
  for (const auto& [p, c] : edges) out[p].push_back(c);
  std::vector<int> colour(n, 0);
  std::function<bool(int)> visit = [&](int u) {
    colour[u] = 1;
    for (int w : out[u]) {
      if (colour[w] == 1) return true;
      if (colour[w] == 0 && visit(w)) return true;
    }
    colour[u] = 2;
    return false;
  };
  for (int u = 0; u < n; ++u) {
    if (colour[u] == 0 && visit(u)) return true;
  }
  return false;
}

// Random DAG with n nodes: each forward pair (in id order) is an edge with
// probability `p`, parents capped at `max_parents`.
inline Dag random_small_dag(Rng& rng, int n, int max_card, double p = 0.4, int max_parents = 3) {
  std::vector<VariableSpec> vars;
  for (int i = 0; i < n; ++i) {
    vars.push_back({i, 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_card - 1)))});
  }
  std::vector<Edge> edges;
  for (int c = 1; c < n; ++c) {
    int parents = 0;
    for (int a = 0; a < c && parents < max_parents; ++a) {
      if (rng.uniform() < p) {
        edges.emplace_back(a, c);
        ++parents;
      }
    }
  }
  return Dag(std::move(vars), std::move(edges));
}

// Log-likelihood of d under the given rows, per-row separable.
inline double row_loglik(const std::vector<double>& counts, const std::vector<double>& probs) {
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) total += counts[i] * std::log(std::max(probs[i], kProbabilityFloor));
  }
  return total;
}

// Best log-likelihood of d over a grid of step `step` inside the credal set
// of a binary-variable CN. The objective is a sum of per-row terms and the
// constraint set is a product of rows, so scanning each row on its own
// visits the optimum of the full product grid.
inline double grid_best_loglik(const CredalNet& cn, const Population& d, double step) {
  const Dag& g = cn.dag();
  double total = 0.0;
  for (const auto& v : g.variables()) {
    const auto& icpt = cn.icpt(v.id);
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      std::vector<double> counts(2, 0.0);
      for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<int> x(d.row(i).begin(), d.row(i).end());
        if (row_by_search(g, v.id, x) == j) counts[x[v.id]] += 1.0;
      }
      if (counts[0] + counts[1] == 0) continue;
      const auto row = icpt.row(j);
      double best = -INFINITY;
      const auto steps = static_cast<long>(std::floor(1.0 / step + 0.5));
      for (long k = 0; k <= steps; ++k) {
        const double p1 = static_cast<double>(k) * step;
        const double p0 = 1.0 - p1;
        if (p1 < row[1].lower - 1e-12 || p1 > row[1].upper + 1e-12) continue;
        if (p0 < row[0].lower - 1e-12 || p0 > row[0].upper + 1e-12) continue;
        best = std::max(best, row_loglik(counts, {p0, p1}));
      }
      total += best;
    }
  }
  return total;
}

// Widths of one row's intervals.
inline std::vector<double> widths(std::span<const Interval> row) {
  std::vector<double> w;
  for (const auto& iv : row) w.push_back(iv.upper - iv.lower);
  return w;
}

}  // namespace test
