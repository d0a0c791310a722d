#include "ctrace/credalnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ctrace {

namespace {

constexpr int kMaxRejections = 1000;

std::vector<IntervalCpt> vacuous_icpts(const Dag& g) {
  std::vector<IntervalCpt> icpts;
  icpts.reserve(g.size());
  for (const auto& v : g.variables()) {
    IntervalCpt icpt{v.id, v.cardinality, {}};
    icpt.table.assign(g.num_parent_configurations(v.id) * v.cardinality, Interval{0.0, 1.0});
    icpts.push_back(std::move(icpt));
  }
  return icpts;
}

void check_icpts(const Dag& g, const std::vector<IntervalCpt>& icpts) {
  if (icpts.size() != g.size()) {
    throw std::invalid_argument("CredalNet: expected one interval CPT per variable");
  }
  for (std::size_t v = 0; v < icpts.size(); ++v) {
    const auto& icpt = icpts[v];
    const std::string where = "CredalNet: interval CPT of variable " + std::to_string(v);
    if (icpt.variable != static_cast<int>(v)) throw std::invalid_argument(where + " out of order");
    if (icpt.cardinality != g.cardinality(icpt.variable)) {
      throw std::invalid_argument(where + " has the wrong cardinality");
    }
    if (icpt.table.size() != g.num_parent_configurations(icpt.variable) *
                                 static_cast<std::size_t>(icpt.cardinality)) {
      throw std::invalid_argument(where + " has the wrong row count");
    }
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      try {
        check_interval_row(icpt.row(j));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ", row " + std::to_string(j) + ": " + e.what());
      }
    }
  }
}

CredalNet idm_impl(std::shared_ptr<const Dag> g, const Population& d,
                   const std::vector<double>& s) {
  if (d.empty()) throw std::invalid_argument("idm_from_data: empty population");
  const auto counts = count_families(*g, d);
  auto icpts = vacuous_icpts(*g);
  for (auto& icpt : icpts) {
    const double sv = s[icpt.variable];
    const auto& n = counts.per_variable[icpt.variable];
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      const double nj =
          static_cast<double>(counts.row_total(icpt.variable, j, icpt.cardinality));
      auto row = icpt.row(j);
      for (int i = 0; i < icpt.cardinality; ++i) {
        const double nij = n[j * icpt.cardinality + i];
        row[i] = {nij / (nj + sv), (nij + sv) / (nj + sv)};
      }
    }
  }
  return CredalNet(std::move(g), std::move(icpts));
}

// Feasible range of p1 in a binary row once p0 = 1 - p1 is imposed.
std::pair<double, double> binary_range(std::span<const Interval> row) {
  return {std::max(row[1].lower, 1.0 - row[0].upper),
          std::min(row[1].upper, 1.0 - row[0].lower)};
}

}  // namespace

void check_interval_row(std::span<const Interval> row) {
  constexpr double tol = kIntervalTolerance;
  double sum_lower = 0.0;
  double sum_upper = 0.0;
  for (const auto& iv : row) {
    if (!(iv.lower >= -tol && iv.upper <= 1.0 + tol && iv.lower <= iv.upper + tol)) {
      throw std::invalid_argument("interval [" + std::to_string(iv.lower) + ", " +
                                  std::to_string(iv.upper) + "] is not inside [0, 1]");
    }
    sum_lower += iv.lower;
    sum_upper += iv.upper;
  }
  if (sum_lower > 1.0 + tol || sum_upper < 1.0 - tol) {
    throw std::invalid_argument("empty credal set (sum of lowers " + std::to_string(sum_lower) +
                                ", sum of uppers " + std::to_string(sum_upper) + ")");
  }
  for (const auto& iv : row) {
    if (iv.lower + (sum_upper - iv.upper) < 1.0 - tol ||
        iv.upper + (sum_lower - iv.lower) > 1.0 + tol) {
      throw std::invalid_argument("interval bound not attainable within the row");
    }
  }
}

CredalNet::CredalNet(std::shared_ptr<const Dag> dag, std::vector<IntervalCpt> icpts)
    : dag_(std::move(dag)), icpts_(std::move(icpts)) {
  if (!dag_) throw std::invalid_argument("CredalNet: null Dag");
  check_icpts(*dag_, icpts_);
}

CredalNet::CredalNet(Dag dag, std::vector<IntervalCpt> icpts)
    : CredalNet(std::make_shared<const Dag>(std::move(dag)), std::move(icpts)) {}

CredalNet idm_from_data(std::shared_ptr<const Dag> g, const Population& d, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("idm_from_data: s must be > 0");
  return idm_impl(g, d, std::vector<double>(g->size(), s));
}

CredalNet idm_from_data(const Dag& g, const Population& d, double s) {
  return idm_from_data(std::make_shared<const Dag>(g), d, s);
}

CredalNet idm_from_data(const Dag& g, const Population& d,
                        const std::map<int, double>& s_per_variable) {
  std::vector<double> s(g.size());
  for (const auto& v : g.variables()) {
    auto it = s_per_variable.find(v.id);
    if (it == s_per_variable.end()) {
      throw std::invalid_argument("idm_from_data: no hyperparameter for variable " +
                                  std::to_string(v.id));
    }
    if (!(it->second > 0.0)) {
      throw std::invalid_argument("idm_from_data: s for variable " + std::to_string(v.id) +
                                  " must be > 0");
    }
    s[v.id] = it->second;
  }
  return idm_impl(std::make_shared<const Dag>(g), d, s);
}

CredalNet contaminate(const BayesNet& bn, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("contaminate: eps must lie in (0, 1)");
  }
  std::vector<IntervalCpt> icpts;
  icpts.reserve(bn.cpts().size());
  for (const auto& cpt : bn.cpts()) {
    IntervalCpt icpt{cpt.variable, cpt.cardinality, {}};
    icpt.table.reserve(cpt.table.size());
    for (double p : cpt.table) {
      const double lower = (1.0 - eps) * p;
      icpt.table.push_back({lower, lower + eps});
    }
    icpts.push_back(std::move(icpt));
  }
  return CredalNet(bn.shared_dag(), std::move(icpts));
}

bool contains(const CredalNet& cn, const BayesNet& bn) {
  if (!cn.dag().same_structure(bn.dag())) {
    throw std::invalid_argument("contains: credal and Bayesian networks differ in structure");
  }
  for (std::size_t v = 0; v < cn.icpts().size(); ++v) {
    const auto& intervals = cn.icpts()[v].table;
    const auto& probs = bn.cpts()[v].table;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] < intervals[k].lower - kContainmentTolerance ||
          probs[k] > intervals[k].upper + kContainmentTolerance) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> project_onto_row(std::span<const double> point,
                                     std::span<const Interval> row) {
  if (point.size() != row.size()) {
    throw std::invalid_argument("project_onto_row: size mismatch");
  }
  check_interval_row(row);
  const std::size_t k = row.size();
  // Feasible points are returned untouched.
  double total = 0.0;
  bool inside = true;
  for (std::size_t i = 0; i < k; ++i) {
    inside = inside && point[i] >= row[i].lower && point[i] <= row[i].upper;
    total += point[i];
  }
  if (inside && std::abs(total - 1.0) <= 1e-12) return {point.begin(), point.end()};

  auto evaluate = [&](double lambda, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      out[i] = std::clamp(point[i] + lambda, row[i].lower, row[i].upper);
      sum += out[i];
    }
    return sum;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < k; ++i) {
    lo = std::min(lo, row[i].lower - point[i]);
    hi = std::max(hi, row[i].upper - point[i]);
  }
  std::vector<double> out(k);
  for (int it = 0; it < 200 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (evaluate(mid, out) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  evaluate(0.5 * (lo + hi), out);
  // Push the rounding residual into entries that still have room.
  double residual = 1.0;
  for (double p : out) residual -= p;
  for (std::size_t i = 0; i < k && residual != 0.0; ++i) {
    const double moved = std::clamp(out[i] + residual, row[i].lower, row[i].upper) - out[i];
    out[i] += moved;
    residual -= moved;
  }
  return out;
}

void sample_row(std::span<const Interval> row, Rng& rng, std::span<double> out) {
  const std::size_t k = row.size();
  if (k == 2) {
    const auto [lo, hi] = binary_range(row);
    if (lo > hi + kIntervalTolerance) {
      throw std::invalid_argument("sample_row: infeasible binary row");
    }
    const double p1 = hi > lo ? rng.uniform(lo, hi) : lo;
    out[1] = p1;
    out[0] = 1.0 - p1;
    return;
  }
  check_interval_row(row);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      out[i] = row[i].lower + (row[i].upper - row[i].lower) * rng.uniform();
      rest -= out[i];
    }
    const auto& last = row[k - 1];
    if (rest >= last.lower - kContainmentTolerance && rest <= last.upper + kContainmentTolerance) {
      out[k - 1] = std::clamp(rest, 0.0, 1.0);
      return;
    }
  }
  std::vector<double> mid(k);
  for (std::size_t i = 0; i < k; ++i) mid[i] = 0.5 * (row[i].lower + row[i].upper);
  const auto projected = project_onto_row(mid, row);
  std::copy(projected.begin(), projected.end(), out.begin());
}

BayesNet sample_point(const CredalNet& cn, Seed seed) {
  std::vector<Cpt> cpts;
  cpts.reserve(cn.icpts().size());
  for (const auto& icpt : cn.icpts()) {
    Cpt cpt{icpt.variable, icpt.cardinality,
            std::vector<double>(icpt.table.size(), 0.0)};
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(icpt.variable), j}));
      sample_row(icpt.row(j), rng, cpt.row(j));
    }
    cpts.push_back(std::move(cpt));
  }
  return BayesNet(cn.shared_dag(), std::move(cpts));
}

BayesNet constrained_mle(const CredalNet& cn, const Population& d, std::size_t n_points,
                         Seed seed) {
  if (d.empty()) throw std::invalid_argument("constrained_mle: empty population");
  if (n_points == 0) throw std::invalid_argument("constrained_mle: n_points must be >= 1");
  const Dag& g = cn.dag();
  const auto counts = count_families(g, d);

  // Only rows with data contribute to the objective.
  struct ObservedRow {
    int variable;
    std::size_t row;
  };
  std::vector<ObservedRow> observed;
  for (const auto& v : g.variables()) {
    for (std::size_t j = 0; j < g.num_parent_configurations(v.id); ++j) {
      if (counts.row_total(v.id, j, v.cardinality) > 0) observed.push_back({v.id, j});
    }
  }

  // Scores a sampled candidate without materialising unobserved rows. The
  // summation order matches log_likelihood(bn, counts).
  std::vector<double> buffer;
  auto score_sampled = [&](Seed candidate) {
    double total = 0.0;
    for (const auto& [v, j] : observed) {
      const auto& icpt = cn.icpts()[v];
      buffer.resize(icpt.cardinality);
      Rng rng(derive_seed(candidate, {static_cast<std::uint64_t>(v), j}));
      sample_row(icpt.row(j), rng, buffer);
      const auto& n = counts.per_variable[v];
      for (int i = 0; i < icpt.cardinality; ++i) {
        const auto nij = n[j * icpt.cardinality + i];
        if (nij) total += nij * std::log(std::max(buffer[i], kProbabilityFloor));
      }
    }
    return total;
  };

  std::size_t best_index = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_points; ++c) {
    const double score = score_sampled(derive_seed(seed, {c}));
    if (score > best_score) {
      best_score = score;
      best_index = c;
    }
  }

  const BayesNet unconstrained = mle(cn.shared_dag(), counts);
  std::vector<Cpt> clipped = unconstrained.cpts();
  for (auto& cpt : clipped) {
    const auto& icpt = cn.icpts()[cpt.variable];
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      const auto projected = project_onto_row(cpt.row(j), icpt.row(j));
      std::copy(projected.begin(), projected.end(), cpt.row(j).begin());
    }
  }
  BayesNet clipped_mle(cn.shared_dag(), std::move(clipped));
  if (log_likelihood(clipped_mle, counts) > best_score) return clipped_mle;
  return sample_point(cn, derive_seed(seed, {best_index}));
}

}  // namespace ctrace
