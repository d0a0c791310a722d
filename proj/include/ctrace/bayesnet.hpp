#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ctrace/graph.hpp"
#include "ctrace/rng.hpp"

namespace ctrace {

// Factors below this value are clamped before taking logs. Stored tables keep
// exact zeros.
inline constexpr double kProbabilityFloor = 1e-12;

// Conditional probability table of one variable, rows in
// parent_configurations order, stored flat (row-major, `cardinality` wide).
struct Cpt {
  int variable = 0;
  int cardinality = 2;
  std::vector<double> table;

  std::size_t num_rows() const { return table.size() / cardinality; }
  std::span<const double> row(std::size_t j) const {
    return {table.data() + j * cardinality, static_cast<std::size_t>(cardinality)};
  }
  std::span<double> row(std::size_t j) {
    return {table.data() + j * cardinality, static_cast<std::size_t>(cardinality)};
  }
};

class BayesNet {
 public:
  // Validates shapes, entries in [0, 1] and row sums within 1e-9.
  BayesNet(std::shared_ptr<const Dag> dag, std::vector<Cpt> cpts);
  BayesNet(Dag dag, std::vector<Cpt> cpts);

  const Dag& dag() const { return *dag_; }
  const std::shared_ptr<const Dag>& shared_dag() const { return dag_; }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  const Cpt& cpt(int id) const { return cpts_.at(id); }

 private:
  std::shared_ptr<const Dag> dag_;
  std::vector<Cpt> cpts_;
};

// Dense matrix of complete observations, one row per individual, columns in
// variable-id order.
class Population {
 public:
  Population() = default;
  Population(std::size_t num_variables, std::vector<int> data);

  std::size_t size() const { return num_variables_ ? data_.size() / num_variables_ : 0; }
  bool empty() const { return data_.empty(); }
  std::size_t num_variables() const { return num_variables_; }
  std::span<const int> row(std::size_t i) const {
    return {data_.data() + i * num_variables_, num_variables_};
  }
  const std::vector<int>& data() const { return data_; }

  Population select(std::span<const std::size_t> rows) const;

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::size_t num_variables_ = 0;
  std::vector<int> data_;
};

// Throws std::invalid_argument if `d` does not fit `g` (column count or an
// out-of-range state).
void check_schema(const Dag& g, const Population& d);

// Count tables n_ij, same layout as Cpt::table.
struct FamilyCounts {
  std::vector<std::vector<std::uint32_t>> per_variable;
  std::size_t sample_size = 0;

  std::uint64_t row_total(int variable, std::size_t row, int cardinality) const;
};

FamilyCounts count_families(const Dag& g, const Population& d);

// Offsets into each Cpt::table for every (individual, variable), so joint
// evaluation for many networks over one Dag skips re-indexing.
class FamilyIndex {
 public:
  FamilyIndex(const Dag& g, const Population& d);

  std::size_t size() const { return rows_; }
  std::span<const std::uint32_t> offsets(std::size_t i) const {
    return {offsets_.data() + i * vars_, vars_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t vars_ = 0;
  std::vector<std::uint32_t> offsets_;
};

// Flat Dirichlet(1, ..., 1) draw for every CPT row.
BayesNet random_parameters(const Dag& g, Seed seed);
BayesNet random_parameters(std::shared_ptr<const Dag> g, Seed seed);

// sum_X log max(p(x_X | pa_X), kProbabilityFloor).
double log_joint(const BayesNet& bn, std::span<const int> x);
// log_joint for every row of the index.
std::vector<double> log_joint_all(const BayesNet& bn, const FamilyIndex& index);
// sum over rows of log_joint.
double log_likelihood(const BayesNet& bn, const Population& d);
// Same quantity from sufficient statistics.
double log_likelihood(const BayesNet& bn, const FamilyCounts& counts);

// Ancestral sampling in topological order.
Population forward_sample(const BayesNet& bn, std::size_t n, Seed seed);

// n distinct row indices out of `total`, uniform without replacement.
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, Rng& rng);
// n distinct rows; requires 1 <= n <= |p|.
Population subsample(const Population& p, std::size_t n, Seed seed);

// n_ij / n_j; unseen parent configurations get the uniform row.
BayesNet mle(const Dag& g, const Population& d);
BayesNet mle(std::shared_ptr<const Dag> g, const Population& d);
BayesNet mle(std::shared_ptr<const Dag> g, const FamilyCounts& counts);

// (n_ij + c_i) / (n_j + S). The scalar form uses c_i = S / k.
BayesNet dirichlet_estimate(const Dag& g, const Population& d, double total_pseudo_count);
BayesNet dirichlet_estimate(const Dag& g, const Population& d,
                            std::span<const double> pseudo_counts);

}  // namespace ctrace
