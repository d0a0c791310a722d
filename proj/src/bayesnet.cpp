#include "ctrace/bayesnet.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ctrace {

namespace {

void check_cpts(const Dag& g, const std::vector<Cpt>& cpts) {
  if (cpts.size() != g.size()) {
    throw std::invalid_argument("BayesNet: expected one CPT per variable");
  }
  for (std::size_t v = 0; v < cpts.size(); ++v) {
    const Cpt& cpt = cpts[v];
    const std::string where = "BayesNet: CPT of variable " + std::to_string(v);
    if (cpt.variable != static_cast<int>(v)) throw std::invalid_argument(where + " out of order");
    if (cpt.cardinality != g.cardinality(cpt.variable)) {
      throw std::invalid_argument(where + " has the wrong cardinality");
    }
    if (cpt.table.size() !=
        g.num_parent_configurations(cpt.variable) * static_cast<std::size_t>(cpt.cardinality)) {
      throw std::invalid_argument(where + " has the wrong row count");
    }
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      double sum = 0.0;
      for (double p : cpt.row(j)) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(where + " has an entry outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(where + ", row " + std::to_string(j) + " does not sum to 1");
      }
    }
  }
}

std::vector<Cpt> empty_cpts(const Dag& g) {
  std::vector<Cpt> cpts;
  cpts.reserve(g.size());
  for (const auto& v : g.variables()) {
    Cpt cpt{v.id, v.cardinality, {}};
    cpt.table.assign(g.num_parent_configurations(v.id) * v.cardinality, 0.0);
    cpts.push_back(std::move(cpt));
  }
  return cpts;
}

inline double floored_log(double p) { return std::log(p < kProbabilityFloor ? kProbabilityFloor : p); }

}  // namespace

BayesNet::BayesNet(std::shared_ptr<const Dag> dag, std::vector<Cpt> cpts)
    : dag_(std::move(dag)), cpts_(std::move(cpts)) {
  if (!dag_) throw std::invalid_argument("BayesNet: null Dag");
  check_cpts(*dag_, cpts_);
}

BayesNet::BayesNet(Dag dag, std::vector<Cpt> cpts)
    : BayesNet(std::make_shared<const Dag>(std::move(dag)), std::move(cpts)) {}

Population::Population(std::size_t num_variables, std::vector<int> data)
    : num_variables_(num_variables), data_(std::move(data)) {
  if (num_variables_ == 0 && !data_.empty()) {
    throw std::invalid_argument("Population: data without variables");
  }
  if (num_variables_ != 0 && data_.size() % num_variables_ != 0) {
    throw std::invalid_argument("Population: data is not a whole number of rows");
  }
}

Population Population::select(std::span<const std::size_t> rows) const {
  std::vector<int> out;
  out.reserve(rows.size() * num_variables_);
  for (std::size_t i : rows) {
    if (i >= size()) throw std::out_of_range("Population::select: row out of range");
    const auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return Population(num_variables_, std::move(out));
}

void check_schema(const Dag& g, const Population& d) {
  if (d.num_variables() != g.size()) {
    throw std::invalid_argument("population has " + std::to_string(d.num_variables()) +
                                " columns but the network has " + std::to_string(g.size()) +
                                " variables");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.row(i);
    for (std::size_t v = 0; v < x.size(); ++v) {
      if (x[v] < 0 || x[v] >= g.cardinality(static_cast<int>(v))) {
        throw std::invalid_argument("population row " + std::to_string(i) + ", variable " +
                                    std::to_string(v) + ": state " + std::to_string(x[v]) +
                                    " out of range");
      }
    }
  }
}

std::uint64_t FamilyCounts::row_total(int variable, std::size_t row, int cardinality) const {
  const auto& t = per_variable[variable];
  std::uint64_t total = 0;
  for (int i = 0; i < cardinality; ++i) total += t[row * cardinality + i];
  return total;
}

FamilyCounts count_families(const Dag& g, const Population& d) {
  check_schema(g, d);
  FamilyCounts counts;
  counts.sample_size = d.size();
  counts.per_variable.resize(g.size());
  for (const auto& v : g.variables()) {
    counts.per_variable[v.id].assign(g.num_parent_configurations(v.id) * v.cardinality, 0);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.row(i);
    for (const auto& v : g.variables()) {
      const std::size_t j = g.parent_configuration_index(v.id, x);
      ++counts.per_variable[v.id][j * v.cardinality + x[v.id]];
    }
  }
  return counts;
}

FamilyIndex::FamilyIndex(const Dag& g, const Population& d)
    : rows_(d.size()), vars_(g.size()) {
  check_schema(g, d);
  for (const auto& v : g.variables()) {
    if (g.num_parent_configurations(v.id) * v.cardinality >
        std::numeric_limits<std::uint32_t>::max()) {
      throw std::invalid_argument("FamilyIndex: CPT too large to index");
    }
  }
  offsets_.resize(rows_ * vars_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto x = d.row(i);
    for (const auto& v : g.variables()) {
      offsets_[i * vars_ + v.id] = static_cast<std::uint32_t>(
          g.parent_configuration_index(v.id, x) * v.cardinality + x[v.id]);
    }
  }
}

BayesNet random_parameters(std::shared_ptr<const Dag> g, Seed seed) {
  Rng rng(seed);
  auto cpts = empty_cpts(*g);
  for (auto& cpt : cpts) {
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      auto row = cpt.row(j);
      double sum = 0.0;
      for (double& p : row) sum += (p = rng.exponential());
      for (double& p : row) p /= sum;
    }
  }
  return BayesNet(std::move(g), std::move(cpts));
}

BayesNet random_parameters(const Dag& g, Seed seed) {
  return random_parameters(std::make_shared<const Dag>(g), seed);
}

double log_joint(const BayesNet& bn, std::span<const int> x) {
  const Dag& g = bn.dag();
  if (x.size() != g.size()) {
    throw std::invalid_argument("log_joint: assignment has " + std::to_string(x.size()) +
                                " values, expected " + std::to_string(g.size()));
  }
  double total = 0.0;
  for (const auto& v : g.variables()) {
    if (x[v.id] < 0 || x[v.id] >= v.cardinality) {
      throw std::invalid_argument("log_joint: state out of range for variable " +
                                  std::to_string(v.id));
    }
    const std::size_t j = g.parent_configuration_index(v.id, x);
    total += floored_log(bn.cpt(v.id).table[j * v.cardinality + x[v.id]]);
  }
  return total;
}

std::vector<double> log_joint_all(const BayesNet& bn, const FamilyIndex& index) {
  const std::size_t n_vars = bn.dag().size();
  std::vector<std::vector<double>> logs(n_vars);
  for (std::size_t v = 0; v < n_vars; ++v) {
    const auto& table = bn.cpts()[v].table;
    logs[v].resize(table.size());
    for (std::size_t k = 0; k < table.size(); ++k) logs[v][k] = floored_log(table[k]);
  }
  std::vector<double> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto off = index.offsets(i);
    double total = 0.0;
    for (std::size_t v = 0; v < n_vars; ++v) total += logs[v][off[v]];
    out[i] = total;
  }
  return out;
}

double log_likelihood(const BayesNet& bn, const Population& d) {
  check_schema(bn.dag(), d);
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) total += log_joint(bn, d.row(i));
  return total;
}

double log_likelihood(const BayesNet& bn, const FamilyCounts& counts) {
  double total = 0.0;
  for (std::size_t v = 0; v < counts.per_variable.size(); ++v) {
    const auto& n = counts.per_variable[v];
    const auto& table = bn.cpts()[v].table;
    for (std::size_t k = 0; k < n.size(); ++k) {
      if (n[k]) total += n[k] * floored_log(table[k]);
    }
  }
  return total;
}

Population forward_sample(const BayesNet& bn, std::size_t n, Seed seed) {
  if (n == 0) throw std::invalid_argument("forward_sample: n must be >= 1");
  const Dag& g = bn.dag();
  const std::size_t m = g.size();
  Rng rng(seed);
  std::vector<int> data(n * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<int> x(data.data() + i * m, m);
    for (int v : g.topo_order()) {
      const auto row = bn.cpt(v).row(g.parent_configuration_index(v, x));
      const double u = rng.uniform();
      double cumulative = 0.0;
      int state = static_cast<int>(row.size()) - 1;
      for (std::size_t s = 0; s < row.size(); ++s) {
        cumulative += row[s];
        if (u < cumulative) {
          state = static_cast<int>(s);
          break;
        }
      }
      // Rounding can leave u above the final cumulative sum; fall back to
      // the last state with positive mass.
      while (row[state] == 0.0 && state > 0) --state;
      x[v] = state;
    }
  }
  return Population(m, std::move(data));
}

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("subsample: n must be >= 1");
  if (n > total) {
    throw std::invalid_argument("subsample: cannot draw " + std::to_string(n) +
                                " rows from " + std::to_string(total));
  }
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + rng.below(total - i)]);
  }
  idx.resize(n);
  return idx;
}

Population subsample(const Population& p, std::size_t n, Seed seed) {
  Rng rng(seed);
  const auto idx = sample_indices(p.size(), n, rng);
  return p.select(idx);
}

BayesNet mle(std::shared_ptr<const Dag> g, const FamilyCounts& counts) {
  auto cpts = empty_cpts(*g);
  for (auto& cpt : cpts) {
    const auto& n = counts.per_variable[cpt.variable];
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      const std::uint64_t nj = counts.row_total(cpt.variable, j, cpt.cardinality);
      auto row = cpt.row(j);
      for (int i = 0; i < cpt.cardinality; ++i) {
        row[i] = nj == 0 ? 1.0 / cpt.cardinality
                         : static_cast<double>(n[j * cpt.cardinality + i]) / static_cast<double>(nj);
      }
    }
  }
  return BayesNet(std::move(g), std::move(cpts));
}

BayesNet mle(std::shared_ptr<const Dag> g, const Population& d) {
  if (d.empty()) throw std::invalid_argument("mle: empty population");
  const auto counts = count_families(*g, d);
  return mle(std::move(g), counts);
}

BayesNet mle(const Dag& g, const Population& d) {
  return mle(std::make_shared<const Dag>(g), d);
}

BayesNet dirichlet_estimate(const Dag& g, const Population& d,
                            std::span<const double> pseudo_counts) {
  for (double c : pseudo_counts) {
    if (!(c > 0.0)) throw std::invalid_argument("dirichlet_estimate: pseudo-counts must be > 0");
  }
  for (const auto& v : g.variables()) {
    if (static_cast<std::size_t>(v.cardinality) != pseudo_counts.size()) {
      throw std::invalid_argument("dirichlet_estimate: pseudo-count vector length " +
                                  std::to_string(pseudo_counts.size()) +
                                  " does not match cardinality of variable " +
                                  std::to_string(v.id));
    }
  }
  const double s = std::accumulate(pseudo_counts.begin(), pseudo_counts.end(), 0.0);
  const auto counts = count_families(g, d);
  auto cpts = empty_cpts(g);
  for (auto& cpt : cpts) {
    const auto& n = counts.per_variable[cpt.variable];
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      const double nj = static_cast<double>(counts.row_total(cpt.variable, j, cpt.cardinality));
      auto row = cpt.row(j);
      for (int i = 0; i < cpt.cardinality; ++i) {
        row[i] = (n[j * cpt.cardinality + i] + pseudo_counts[i]) / (nj + s);
      }
    }
  }
  return BayesNet(g, std::move(cpts));
}

BayesNet dirichlet_estimate(const Dag& g, const Population& d, double total_pseudo_count) {
  if (!(total_pseudo_count > 0.0)) {
    throw std::invalid_argument("dirichlet_estimate: total pseudo-count must be > 0");
  }
  check_schema(g, d);
  // Symmetric prior per variable; cardinalities may differ across variables.
  const auto counts = count_families(g, d);
  auto cpts = empty_cpts(g);
  for (auto& cpt : cpts) {
    const double c = total_pseudo_count / cpt.cardinality;
    const auto& n = counts.per_variable[cpt.variable];
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      const double nj = static_cast<double>(counts.row_total(cpt.variable, j, cpt.cardinality));
      auto row = cpt.row(j);
      for (int i = 0; i < cpt.cardinality; ++i) {
        row[i] = (n[j * cpt.cardinality + i] + c) / (nj + total_pseudo_count);
      }
    }
  }
  return BayesNet(g, std::move(cpts));
}

}  // namespace ctrace
