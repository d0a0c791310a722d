#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctrace/attack.hpp"
#include "ctrace/rng.hpp"

namespace ctrace {

inline constexpr std::uint64_t kDefaultSeed = 20250101;

// Field names mirror the JSON config file.
struct ExperimentConfig {
  std::vector<int> m_values{10, 20, 50, 100};
  std::vector<int> e_values{1, 2, 4};
  std::size_t pop_size = 10000;
  std::size_t ref_size = 5000;
  std::size_t target_size = 500;
  int repetitions = 20;
  std::vector<double> alpha_grid = log_spaced_alphas(1e-4, 0.631, 20);
  std::vector<double> s_values{1.0, 1000.0};
  std::size_t n_credal_points = 500;
  Seed seed{kDefaultSeed};
  int cardinality = 2;
  // Draw the reference population from P minus T instead of from all of P.
  bool disjoint_reference = true;
  // Worker threads; results do not depend on this.
  int workers = 1;
};

// Lists every offending field, one per entry of fields().
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

void validate(const ExperimentConfig& cfg);
// Missing fields keep their defaults. Besides "alpha_grid", the grid may be
// given as "alpha_min", "alpha_max" and "alpha_count" (log-spaced).
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig read_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Per (configuration, repetition, s, alpha) checks of the CN attack against
// the BN attack on the same draw of R and T.
struct AttackDiagnostics {
  int m = 0;
  int e = 0;
  int repetition = 0;
  double s = 0.0;
  double alpha = 0.0;
  double tau_bn = 0.0;
  double tau_cn = 0.0;
  // Fraction of T flagged by the CN attack but not by the BN attack.
  double cn_not_bn = 0.0;
  // Realised false positive rates on P minus T.
  double fpr_bn = 0.0;
  double fpr_cn = 0.0;
};

struct ExperimentResult {
  std::vector<PowerCurve> curves;
  std::vector<AttackDiagnostics> diagnostics;
};

struct AggregateRow {
  int m = 0;
  int e = 0;
  std::uint64_t complexity = 0;
  CurveKind kind = CurveKind::bn_empirical;
  double s_or_eps = 0.0;
  double alpha = 0.0;
  double mean_beta = 0.0;
  double max_beta = 0.0;
  std::size_t count = 0;
};

// Mean and max beta per (configuration, kind, s, alpha), in first-seen order.
std::vector<AggregateRow> aggregate(const std::vector<PowerCurve>& curves);

// One ground-truth network and population for (m, e); repetitions redraw
// only R and T. Curves per repetition: BN, then CN for each s; then a single
// theoretical curve.
ExperimentResult run_configuration(const ExperimentConfig& cfg, int m, int e);
// Every (m, e) in the grid, m-major.
ExperimentResult run_all(const ExperimentConfig& cfg);

// Summary of the privacy checks derived from a result.
struct CheckSummary {
  int m = 0;
  int e = 0;
  std::uint64_t complexity = 0;
  double s = 0.0;
  // max over alpha of mean beta_CN - mean beta_BN.
  double ordering_slack = 0.0;
  // Mean over repetitions and alpha of the CN-but-not-BN fraction of T.
  double consistency = 0.0;
  // The same fraction at its worst alpha (mean over repetitions).
  double consistency_peak = 0.0;
  // Share of (repetition, alpha) pairs with tau_CN >= tau_BN - 1e-9.
  // Reported only; it does not enter the overall verdict.
  double threshold_ordering = 0.0;
  // Mean over alpha of |mean beta_BN - theoretical beta|.
  double bn_theory_deviation = 0.0;
};

inline constexpr double kOrderingSlack = 0.05;
inline constexpr double kConsistencyBound = 0.05;
inline constexpr double kThresholdOrderingShare = 0.9;

std::vector<CheckSummary> summarize(const ExperimentResult& result);

// Writes raw.csv, aggregate.csv, diagnostics.csv and report.md into `dir`
// (created if needed).
void export_result(const ExperimentResult& result, const std::filesystem::path& dir);
// Reads raw.csv and diagnostics.csv written by export_result.
ExperimentResult read_result(const std::filesystem::path& dir);

std::string raw_csv(const ExperimentResult& result);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string diagnostics_csv(const ExperimentResult& result);
std::string report_markdown(const ExperimentResult& result);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace ctrace
