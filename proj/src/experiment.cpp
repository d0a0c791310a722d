#include "ctrace/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

#include "ctrace/bayesnet.hpp"
#include "ctrace/credalnet.hpp"
#include "ctrace/graph.hpp"

namespace ctrace {

using nlohmann::json;

namespace {

// Seed-derivation tags.
constexpr std::uint64_t kGroundTruthTag = 1;
constexpr std::uint64_t kRepetitionTag = 2;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Ground truth shared by all repetitions of one (m, e).
struct GroundTruth {
  int m = 0;
  int e = 0;
  std::shared_ptr<const Dag> dag;
  std::uint64_t complexity = 0;
  Population population;
  std::unique_ptr<FamilyIndex> index;
};

GroundTruth make_ground_truth(const ExperimentConfig& cfg, int m, int e) {
  const Seed base = derive_seed(cfg.seed, {kGroundTruthTag, static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(e)});
  GroundTruth gt;
  gt.m = m;
  gt.e = e;
  gt.dag = std::make_shared<const Dag>(random_dag(m, e, cfg.cardinality, derive_seed(base, {0})));
  gt.complexity = complexity(*gt.dag);
  const BayesNet truth = random_parameters(gt.dag, derive_seed(base, {1}));
  gt.population = forward_sample(truth, cfg.pop_size, derive_seed(base, {2}));
  gt.index = std::make_unique<FamilyIndex>(*gt.dag, gt.population);
  return gt;
}

struct RepetitionOutput {
  std::vector<PowerCurve> curves;
  std::vector<AttackDiagnostics> diagnostics;
};

std::vector<double> gather(const std::vector<double>& values, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

RepetitionOutput run_repetition(const ExperimentConfig& cfg, const GroundTruth& gt, int rep) {
  const Seed base = derive_seed(cfg.seed, {kRepetitionTag, static_cast<std::uint64_t>(gt.m),
                                           static_cast<std::uint64_t>(gt.e),
                                           static_cast<std::uint64_t>(rep)});
  const Population& pop = gt.population;
  const std::size_t n = pop.size();

  Rng target_rng(derive_seed(base, {0}));
  const auto target_idx = sample_indices(n, cfg.target_size, target_rng);
  std::vector<char> in_target(n, 0);
  for (std::size_t i : target_idx) in_target[i] = 1;
  std::vector<std::size_t> outside_target;
  outside_target.reserve(n - target_idx.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_target[i]) outside_target.push_back(i);
  }

  Rng reference_rng(derive_seed(base, {1}));
  std::vector<std::size_t> reference_idx;
  if (cfg.disjoint_reference) {
    for (std::size_t k : sample_indices(outside_target.size(), cfg.ref_size, reference_rng)) {
      reference_idx.push_back(outside_target[k]);
    }
  } else {
    reference_idx = sample_indices(n, cfg.ref_size, reference_rng);
  }

  const Population target = pop.select(target_idx);
  const Population reference = pop.select(reference_idx);
  const BayesNet theta_t = mle(gt.dag, target);
  const BayesNet theta_r = mle(gt.dag, reference);

  const auto log_ref = log_joint_all(theta_r, *gt.index);
  auto llr_of = [&](const BayesNet& released) {
    auto l = log_joint_all(released, *gt.index);
    for (std::size_t i = 0; i < l.size(); ++i) l[i] -= log_ref[i];
    return l;
  };
  auto false_positive_rate = [&](const std::vector<double>& l, double tau) {
    std::size_t flagged = 0;
    for (std::size_t i : outside_target) flagged += l[i] > tau;
    return static_cast<double>(flagged) / static_cast<double>(outside_target.size());
  };

  RepetitionOutput out;
  CurveMeta meta{CurveKind::bn_empirical, 0.0, rep, gt.m, gt.e, gt.complexity};

  const auto llr_bn = llr_of(theta_t);
  const EmpiricalDistribution null_bn(gather(llr_bn, reference_idx));
  const auto members_bn = gather(llr_bn, target_idx);
  out.curves.push_back({power_points(null_bn, members_bn, cfg.alpha_grid), meta});

  for (std::size_t si = 0; si < cfg.s_values.size(); ++si) {
    const double s = cfg.s_values[si];
    const CredalNet released = idm_from_data(gt.dag, target, s);
    const BayesNet theta_k =
        constrained_mle(released, reference, cfg.n_credal_points, derive_seed(base, {2, si}));
    const auto llr_cn = llr_of(theta_k);
    const EmpiricalDistribution null_cn(gather(llr_cn, reference_idx));
    const auto members_cn = gather(llr_cn, target_idx);

    meta.kind = CurveKind::cn_empirical;
    meta.s_or_eps = s;
    out.curves.push_back({power_points(null_cn, members_cn, cfg.alpha_grid), meta});

    for (double alpha : cfg.alpha_grid) {
      AttackDiagnostics d;
      d.m = gt.m;
      d.e = gt.e;
      d.repetition = rep;
      d.s = s;
      d.alpha = alpha;
      d.tau_bn = threshold(null_bn, alpha);
      d.tau_cn = threshold(null_cn, alpha);
      std::size_t cn_only = 0;
      for (std::size_t k = 0; k < target_idx.size(); ++k) {
        cn_only += members_cn[k] > d.tau_cn && !(members_bn[k] > d.tau_bn);
      }
      d.cn_not_bn = static_cast<double>(cn_only) / static_cast<double>(target_idx.size());
      d.fpr_bn = false_positive_rate(llr_bn, d.tau_bn);
      d.fpr_cn = false_positive_rate(llr_cn, d.tau_cn);
      out.diagnostics.push_back(d);
    }
  }
  return out;
}

PowerCurve theoretical_curve(const ExperimentConfig& cfg, const GroundTruth& gt) {
  PowerCurve curve;
  curve.meta = {CurveKind::theoretical, 0.0, -1, gt.m, gt.e, gt.complexity};
  for (double alpha : cfg.alpha_grid) {
    curve.points.push_back(
        {alpha, theoretical_power(static_cast<double>(gt.complexity), cfg.target_size, alpha)});
  }
  return curve;
}

// Runs fn(i) for i in [0, n) on `workers` threads; rethrows the first
// failure by index.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExperimentResult run_grid(const ExperimentConfig& cfg, const std::vector<std::pair<int, int>>& grid) {
  validate(cfg);
  std::vector<GroundTruth> truths(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    truths[i] = make_ground_truth(cfg, grid[i].first, grid[i].second);
  });

  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  std::vector<RepetitionOutput> outputs(grid.size() * reps);
  parallel_for(outputs.size(), cfg.workers, [&](std::size_t task) {
    outputs[task] = run_repetition(cfg, truths[task / reps], static_cast<int>(task % reps));
  });

  ExperimentResult result;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t r = 0; r < reps; ++r) {
      auto& o = outputs[c * reps + r];
      std::move(o.curves.begin(), o.curves.end(), std::back_inserter(result.curves));
      std::move(o.diagnostics.begin(), o.diagnostics.end(), std::back_inserter(result.diagnostics));
    }
    result.curves.push_back(theoretical_curve(cfg, truths[c]));
  }
  return result;
}

// Minimal CSV reader for the files this module writes.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != expected_header) {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed number '" + s + "'");
  }
  return x;
}

long long parse_int(const std::string& s) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed integer '" + s + "'");
  }
  return x;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

constexpr const char* kRawHeader =
    "configuration_m,configuration_e,complexity,model_kind,s_or_eps,repetition,alpha,beta";
constexpr const char* kAggregateHeader =
    "configuration_m,configuration_e,complexity,model_kind,s_or_eps,alpha,mean_beta,max_beta,"
    "repetitions";
constexpr const char* kDiagnosticsHeader =
    "configuration_m,configuration_e,repetition,s,alpha,tau_bn,tau_cn,cn_not_bn,fpr_bn,fpr_cn";

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid experiment config: " + join(problems, "; ")),
      problems_(std::move(problems)) {}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.m_values.empty()) problems.push_back("m_values: must not be empty");
  for (int m : cfg.m_values) {
    if (m < 2) problems.push_back("m_values: every node count must be >= 2");
  }
  if (cfg.e_values.empty()) problems.push_back("e_values: must not be empty");
  for (int e : cfg.e_values) {
    if (e < 1) problems.push_back("e_values: every edge density must be >= 1");
  }
  for (int m : cfg.m_values) {
    for (int e : cfg.e_values) {
      if (m >= 2 && e >= 1 && static_cast<long long>(m) * e > static_cast<long long>(m) * (m - 1) / 2) {
        problems.push_back("e_values: density " + std::to_string(e) + " needs more than the " +
                           std::to_string(m * (m - 1) / 2) + " forward pairs of " +
                           std::to_string(m) + " nodes");
      }
    }
  }
  if (cfg.pop_size < 1) problems.push_back("pop_size: must be >= 1");
  if (cfg.ref_size < 1) problems.push_back("ref_size: must be >= 1");
  if (cfg.target_size < 1) problems.push_back("target_size: must be >= 1");
  if (cfg.target_size > cfg.pop_size) problems.push_back("target_size: exceeds pop_size");
  if (cfg.ref_size > cfg.pop_size) problems.push_back("ref_size: exceeds pop_size");
  if (cfg.disjoint_reference && cfg.ref_size + cfg.target_size > cfg.pop_size) {
    problems.push_back("ref_size: ref_size + target_size exceeds pop_size with disjoint_reference");
  }
  if (cfg.repetitions < 1) problems.push_back("repetitions: must be >= 1");
  try {
    check_alpha_grid(cfg.alpha_grid);
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("alpha_grid: ") + e.what());
  }
  for (double s : cfg.s_values) {
    if (!(s > 0.0)) problems.push_back("s_values: every hyperparameter must be > 0");
  }
  if (cfg.n_credal_points < 1) problems.push_back("n_credal_points: must be >= 1");
  if (cfg.cardinality < 2) problems.push_back("cardinality: must be >= 2");
  if (cfg.workers < 1) problems.push_back("workers: must be >= 1");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError({"config: expected a JSON object"});
  ExperimentConfig cfg;
  std::vector<std::string> problems;

  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception&) {
      problems.push_back(std::string(key) + ": wrong type");
    }
  };
  auto read_count = [&](const char* key, std::size_t& field) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      problems.push_back(std::string(key) + ": must be a positive integer");
    } else {
      field = v.get<std::size_t>();
    }
  };

  static const std::vector<std::string> known = {
      "m_values",  "e_values",      "pop_size",        "ref_size",  "target_size",
      "repetitions", "alpha_grid",  "alpha_min",       "alpha_max", "alpha_count",
      "s_values",  "n_credal_points", "seed",          "cardinality", "disjoint_reference",
      "workers"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      problems.push_back(item.key() + ": unknown field");
    }
  }

  read("m_values", cfg.m_values);
  read("e_values", cfg.e_values);
  read_count("pop_size", cfg.pop_size);
  read_count("ref_size", cfg.ref_size);
  read_count("target_size", cfg.target_size);
  read("repetitions", cfg.repetitions);
  read("s_values", cfg.s_values);
  read_count("n_credal_points", cfg.n_credal_points);
  read("cardinality", cfg.cardinality);
  read("disjoint_reference", cfg.disjoint_reference);
  read("workers", cfg.workers);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      problems.push_back("seed: must be a non-negative integer");
    } else {
      cfg.seed = Seed{j.at("seed").get<std::uint64_t>()};
    }
  }

  const bool spaced = j.contains("alpha_min") || j.contains("alpha_max") || j.contains("alpha_count");
  if (j.contains("alpha_grid") && spaced) {
    problems.push_back("alpha_grid: give either alpha_grid or alpha_min/alpha_max/alpha_count");
  } else if (j.contains("alpha_grid")) {
    read("alpha_grid", cfg.alpha_grid);
  } else if (spaced) {
    double lo = 1e-4;
    double hi = 0.631;
    std::size_t k = 20;
    read("alpha_min", lo);
    read("alpha_max", hi);
    read_count("alpha_count", k);
    try {
      cfg.alpha_grid = log_spaced_alphas(lo, hi, k);
    } catch (const std::invalid_argument& e) {
      problems.push_back(std::string("alpha_min/alpha_max/alpha_count: ") + e.what());
    }
  }

  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& cfg) {
  return {{"m_values", cfg.m_values},
          {"e_values", cfg.e_values},
          {"pop_size", cfg.pop_size},
          {"ref_size", cfg.ref_size},
          {"target_size", cfg.target_size},
          {"repetitions", cfg.repetitions},
          {"alpha_grid", cfg.alpha_grid},
          {"s_values", cfg.s_values},
          {"n_credal_points", cfg.n_credal_points},
          {"seed", cfg.seed.value},
          {"cardinality", cfg.cardinality},
          {"disjoint_reference", cfg.disjoint_reference},
          {"workers", cfg.workers}};
}

std::vector<AggregateRow> aggregate(const std::vector<PowerCurve>& curves) {
  using Key = std::tuple<int, int, int, double, double>;
  std::map<Key, std::size_t> slot;
  std::vector<AggregateRow> rows;
  for (const auto& curve : curves) {
    const auto& meta = curve.meta;
    for (const auto& pt : curve.points) {
      const Key key{meta.m, meta.e, static_cast<int>(meta.kind), meta.s_or_eps, pt.alpha};
      auto [it, inserted] = slot.try_emplace(key, rows.size());
      if (inserted) {
        rows.push_back({meta.m, meta.e, meta.complexity, meta.kind, meta.s_or_eps, pt.alpha, 0.0,
                        pt.beta, 0});
      }
      auto& row = rows[it->second];
      row.mean_beta += pt.beta;
      row.max_beta = std::max(row.max_beta, pt.beta);
      ++row.count;
    }
  }
  for (auto& row : rows) row.mean_beta /= static_cast<double>(row.count);
  return rows;
}

ExperimentResult run_configuration(const ExperimentConfig& cfg, int m, int e) {
  if (std::find(cfg.m_values.begin(), cfg.m_values.end(), m) == cfg.m_values.end() ||
      std::find(cfg.e_values.begin(), cfg.e_values.end(), e) == cfg.e_values.end()) {
    throw std::invalid_argument("run_configuration: (m, e) is not in the configured grid");
  }
  return run_grid(cfg, {{m, e}});
}

ExperimentResult run_all(const ExperimentConfig& cfg) {
  std::vector<std::pair<int, int>> grid;
  for (int m : cfg.m_values) {
    for (int e : cfg.e_values) grid.emplace_back(m, e);
  }
  return run_grid(cfg, grid);
}

std::vector<CheckSummary> summarize(const ExperimentResult& result) {
  const auto rows = aggregate(result.curves);
  // (m, e) -> alpha -> mean beta, per kind.
  using ConfigKey = std::pair<int, int>;
  std::map<ConfigKey, std::map<double, double>> bn_mean;
  std::map<ConfigKey, std::map<double, double>> theory;
  std::map<std::tuple<int, int, double>, std::map<double, double>> cn_mean;
  std::map<ConfigKey, std::uint64_t> complexities;
  std::vector<std::tuple<int, int, double>> order;
  for (const auto& r : rows) {
    complexities[{r.m, r.e}] = r.complexity;
    switch (r.kind) {
      case CurveKind::bn_empirical: bn_mean[{r.m, r.e}][r.alpha] = r.mean_beta; break;
      case CurveKind::theoretical: theory[{r.m, r.e}][r.alpha] = r.mean_beta; break;
      case CurveKind::cn_empirical: {
        const std::tuple<int, int, double> key{r.m, r.e, r.s_or_eps};
        if (!cn_mean.contains(key)) order.push_back(key);
        cn_mean[key][r.alpha] = r.mean_beta;
        break;
      }
    }
  }

  std::vector<CheckSummary> out;
  for (const auto& key : order) {
    const auto [m, e, s] = key;
    CheckSummary c;
    c.m = m;
    c.e = e;
    c.s = s;
    c.complexity = complexities[{m, e}];
    c.ordering_slack = -1.0;
    for (const auto& [alpha, beta_cn] : cn_mean[key]) {
      c.ordering_slack = std::max(c.ordering_slack, beta_cn - bn_mean[{m, e}][alpha]);
    }
    std::map<double, std::pair<double, std::size_t>> cn_only;
    std::size_t ordered = 0;
    std::size_t total = 0;
    for (const auto& d : result.diagnostics) {
      if (d.m != m || d.e != e || d.s != s) continue;
      auto& acc = cn_only[d.alpha];
      acc.first += d.cn_not_bn;
      ++acc.second;
      ordered += d.tau_cn >= d.tau_bn - 1e-9;
      ++total;
    }
    for (const auto& [alpha, acc] : cn_only) {
      const double mean = acc.first / static_cast<double>(acc.second);
      c.consistency += mean;
      c.consistency_peak = std::max(c.consistency_peak, mean);
    }
    if (!cn_only.empty()) c.consistency /= static_cast<double>(cn_only.size());
    c.threshold_ordering = total ? static_cast<double>(ordered) / static_cast<double>(total) : 0.0;
    const auto& bn = bn_mean[{m, e}];
    const auto& th = theory[{m, e}];
    double dev = 0.0;
    std::size_t count = 0;
    for (const auto& [alpha, beta] : bn) {
      if (auto it = th.find(alpha); it != th.end()) {
        dev += std::abs(beta - it->second);
        ++count;
      }
    }
    c.bn_theory_deviation = count ? dev / static_cast<double>(count) : 0.0;
    out.push_back(c);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string raw_csv(const ExperimentResult& result) {
  std::string out = std::string(kRawHeader) + "\n";
  for (const auto& curve : result.curves) {
    const auto& m = curve.meta;
    const std::string prefix = std::to_string(m.m) + "," + std::to_string(m.e) + "," +
                               std::to_string(m.complexity) + "," + to_string(m.kind) + "," +
                               format_double(m.s_or_eps) + "," + std::to_string(m.repetition) + ",";
    for (const auto& pt : curve.points) {
      out += prefix + format_double(pt.alpha) + "," + format_double(pt.beta) + "\n";
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + "," + std::to_string(r.e) + "," + std::to_string(r.complexity) +
           "," + to_string(r.kind) + "," + format_double(r.s_or_eps) + "," +
           format_double(r.alpha) + "," + format_double(r.mean_beta) + "," +
           format_double(r.max_beta) + "," + std::to_string(r.count) + "\n";
  }
  return out;
}

std::string diagnostics_csv(const ExperimentResult& result) {
  std::string out = std::string(kDiagnosticsHeader) + "\n";
  for (const auto& d : result.diagnostics) {
    out += std::to_string(d.m) + "," + std::to_string(d.e) + "," + std::to_string(d.repetition) +
           "," + format_double(d.s) + "," + format_double(d.alpha) + "," +
           format_double(d.tau_bn) + "," + format_double(d.tau_cn) + "," +
           format_double(d.cn_not_bn) + "," + format_double(d.fpr_bn) + "," +
           format_double(d.fpr_cn) + "\n";
  }
  return out;
}

std::string report_markdown(const ExperimentResult& result) {
  const auto checks = summarize(result);
  std::ostringstream os;
  os << "# Tracing attack experiment report\n\n";
  os << "Empirical checks of the CN attack against the BN attack, one line per "
        "(configuration, s).\n\n";
  os << "- ordering: max over alpha of mean beta_CN - mean beta_BN, pass if <= "
     << format_double(kOrderingSlack) << "\n";
  os << "- consistency: mean over repetitions and alpha of the share of T flagged by CN but "
        "not BN, pass if <= "
     << format_double(kConsistencyBound) << "; peak is the same share at its worst alpha\n";
  os << "- thresholds: share of (repetition, alpha) pairs with tau_CN >= tau_BN, reported "
        "only (reference level "
     << format_double(kThresholdOrderingShare) << ")\n";
  os << "- BN vs theory: mean over alpha of |mean beta_BN - theoretical beta|\n\n";
  os << "| m | e | C(G) | s | ordering | pass | consistency | peak | pass | thresholds | BN vs "
        "theory |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  bool all_pass = true;
  char buf[32];
  auto fixed = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return std::string(buf);
  };
  for (const auto& c : checks) {
    const bool ordering = c.ordering_slack <= kOrderingSlack;
    const bool consistency = c.consistency <= kConsistencyBound;
    all_pass = all_pass && ordering && consistency;
    os << "| " << c.m << " | " << c.e << " | " << c.complexity << " | " << format_double(c.s)
       << " | " << fixed(c.ordering_slack) << " | " << (ordering ? "pass" : "FAIL") << " | "
       << fixed(c.consistency) << " | " << fixed(c.consistency_peak) << " | "
       << (consistency ? "pass" : "FAIL") << " | " << fixed(c.threshold_ordering) << " | "
       << fixed(c.bn_theory_deviation) << " |\n";
  }
  if (!result.diagnostics.empty()) {
    double fpr_bn = 0.0;
    double fpr_cn = 0.0;
    double excess = 0.0;
    for (const auto& d : result.diagnostics) {
      fpr_bn += d.fpr_bn;
      fpr_cn += d.fpr_cn;
      excess = std::max({excess, d.fpr_bn - d.alpha, d.fpr_cn - d.alpha});
    }
    const auto n = static_cast<double>(result.diagnostics.size());
    os << "\nRealised false positive rate on P minus T: mean " << fixed(fpr_bn / n) << " (BN), "
       << fixed(fpr_cn / n) << " (CN); largest excess over alpha " << fixed(excess) << ".\n";
  }
  os << "\nOverall: " << (checks.empty() ? "no CN curves" : all_pass ? "all checks pass" : "some checks fail")
     << "\n";
  return os.str();
}

void export_result(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  write_file(dir / "raw.csv", raw_csv(result));
  write_file(dir / "aggregate.csv", aggregate_csv(aggregate(result.curves)));
  write_file(dir / "diagnostics.csv", diagnostics_csv(result));
  write_file(dir / "report.md", report_markdown(result));
}

ExperimentResult read_result(const std::filesystem::path& dir) {
  ExperimentResult result;
  const auto raw_path = dir / "raw.csv";
  try {
    for (const auto& cells : read_csv(raw_path, kRawHeader)) {
      if (cells.size() != 8) throw std::runtime_error("expected 8 columns");
      CurveMeta meta{curve_kind_from_string(cells[3]), parse_double(cells[4]),
                     static_cast<int>(parse_int(cells[5])), static_cast<int>(parse_int(cells[0])),
                     static_cast<int>(parse_int(cells[1])),
                     static_cast<std::uint64_t>(parse_int(cells[2]))};
      const PowerPoint pt{parse_double(cells[6]), parse_double(cells[7])};
      auto& curves = result.curves;
      const bool same = !curves.empty() && curves.back().meta.kind == meta.kind &&
                        curves.back().meta.m == meta.m && curves.back().meta.e == meta.e &&
                        curves.back().meta.s_or_eps == meta.s_or_eps &&
                        curves.back().meta.repetition == meta.repetition &&
                        curves.back().points.back().alpha < pt.alpha;
      if (!same) curves.push_back({{}, meta});
      curves.back().points.push_back(pt);
    }
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(raw_path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(raw_path.string() + ": " + e.what());
  }
  const auto diag_path = dir / "diagnostics.csv";
  if (std::filesystem::exists(diag_path)) {
    try {
      for (const auto& c : read_csv(diag_path, kDiagnosticsHeader)) {
        if (c.size() != 10) throw std::runtime_error("expected 10 columns");
        result.diagnostics.push_back({static_cast<int>(parse_int(c[0])), static_cast<int>(parse_int(c[1])),
                                      static_cast<int>(parse_int(c[2])), parse_double(c[3]),
                                      parse_double(c[4]), parse_double(c[5]), parse_double(c[6]),
                                      parse_double(c[7]), parse_double(c[8]), parse_double(c[9])});
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(diag_path.string() + ": " + e.what());
    }
  }
  return result;
}

}  // namespace ctrace
