#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ctrace/bayesnet.hpp"
#include "ctrace/graph.hpp"
#include "ctrace/rng.hpp"

namespace ctrace {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Interval-valued CPT, laid out like Cpt: rows in parent_configurations
// order, `cardinality` intervals per row.
struct IntervalCpt {
  int variable = 0;
  int cardinality = 2;
  std::vector<Interval> table;

  std::size_t num_rows() const { return table.size() / cardinality; }
  std::span<const Interval> row(std::size_t j) const {
    return {table.data() + j * cardinality, static_cast<std::size_t>(cardinality)};
  }
  std::span<Interval> row(std::size_t j) {
    return {table.data() + j * cardinality, static_cast<std::size_t>(cardinality)};
  }
};

// Tolerance used when validating interval rows.
inline constexpr double kIntervalTolerance = 1e-9;
// Tolerance used by contains().
inline constexpr double kContainmentTolerance = 1e-12;

// Throws std::invalid_argument if the row is not a non-empty credal set with
// reachable bounds: 0 <= l <= u <= 1, sum l <= 1 <= sum u, and for every i
// l_i + sum_{k != i} u_k >= 1 and u_i + sum_{k != i} l_k <= 1.
void check_interval_row(std::span<const Interval> row);

// Locally and separately specified credal network. The joint credal set (the
// strong extension) is never built; points are selected row by row.
class CredalNet {
 public:
  CredalNet(std::shared_ptr<const Dag> dag, std::vector<IntervalCpt> icpts);
  CredalNet(Dag dag, std::vector<IntervalCpt> icpts);

  const Dag& dag() const { return *dag_; }
  const std::shared_ptr<const Dag>& shared_dag() const { return dag_; }
  const std::vector<IntervalCpt>& icpts() const { return icpts_; }
  const IntervalCpt& icpt(int id) const { return icpts_.at(id); }

 private:
  std::shared_ptr<const Dag> dag_;
  std::vector<IntervalCpt> icpts_;
};

// Local imprecise Dirichlet model:
//   [ n_ij / (n_j + s), (n_ij + s) / (n_j + s) ].
CredalNet idm_from_data(std::shared_ptr<const Dag> g, const Population& d, double s);
CredalNet idm_from_data(const Dag& g, const Population& d, double s);
// One hyperparameter per variable; the map must cover every variable.
CredalNet idm_from_data(const Dag& g, const Population& d,
                        const std::map<int, double>& s_per_variable);

// [ (1 - eps) p, (1 - eps) p + eps ] for every CPT entry, 0 < eps < 1.
CredalNet contaminate(const BayesNet& bn, double eps);

// True iff every CPT entry of `bn` lies in its interval (inclusive, within
// kContainmentTolerance). Throws if the two networks differ in structure.
bool contains(const CredalNet& cn, const BayesNet& bn);

// Euclidean projection of `point` onto { p : l <= p <= u, sum p = 1 }, i.e.
// p_i = clamp(point_i + lambda, l_i, u_i) with lambda chosen so the row sums
// to one. Used for the clipped-MLE candidate and the rejection fallback.
std::vector<double> project_onto_row(std::span<const double> point,
                                     std::span<const Interval> row);

// One distribution inside `row`, written to `out`. Binary rows draw p1
// uniformly on the feasible range (which is [l1, u1] for IDM and
// contamination rows) and set p0 = 1 - p1. Wider rows draw the first k - 1
// entries uniformly in their boxes and accept when the completion fits;
// after 1000 rejections the box midpoint is projected instead.
void sample_row(std::span<const Interval> row, Rng& rng, std::span<double> out);

// Every row is drawn from its own stream derive_seed(seed, {variable, row}).
BayesNet sample_point(const CredalNet& cn, Seed seed);

// Approximate argmax over the credal set of the log-likelihood of `d`.
// Candidates are sample_point(cn, derive_seed(seed, {c})) for c < n_points
// followed by the interval-projected MLE of `d`; the best one wins, with the
// lowest index breaking ties.
BayesNet constrained_mle(const CredalNet& cn, const Population& d, std::size_t n_points,
                         Seed seed);

}  // namespace ctrace
