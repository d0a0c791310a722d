#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctrace/bayesnet.hpp"
#include "ctrace/stats.hpp"

namespace ctrace {

enum class ModelKind { bn, cn };

// Parameters of a tracing attack. For a released BN the target is the
// released estimate; for a released CN it is the constrained MLE of the
// reference data inside the credal set. The reference is always the MLE of
// the attacker's reference population.
struct AttackModel {
  ModelKind kind = ModelKind::bn;
  std::shared_ptr<const BayesNet> target;
  std::shared_ptr<const BayesNet> reference;
};

// Throws std::invalid_argument unless both networks exist and share a Dag.
AttackModel make_attack_model(ModelKind kind, BayesNet target, BayesNet reference);

struct CalibratedTest {
  AttackModel model;
  double alpha = 0.05;
  double tau = 0.0;
};

enum class Decision { non_member, member };

// log p(x | target) - log p(x | reference), both floor-clamped.
double llr(const AttackModel& model, std::span<const int> x);
std::vector<double> llr_all(const AttackModel& model, const Population& d);
std::vector<double> llr_all(const AttackModel& model, const FamilyIndex& index);

// tau(alpha) = empirical (1 - alpha)-quantile of the null statistic.
double threshold(const EmpiricalDistribution& null_llr, double alpha);

// Calibrates on `null_sample` (in practice the reference population).
CalibratedTest calibrate(const AttackModel& model, const Population& null_sample, double alpha);

// member iff llr(x) > tau.
Decision decide(const CalibratedTest& test, std::span<const int> x);

enum class CurveKind { bn_empirical, cn_empirical, theoretical };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& s);

struct PowerPoint {
  double alpha = 0.0;
  double beta = 0.0;
};

struct CurveMeta {
  CurveKind kind = CurveKind::bn_empirical;
  double s_or_eps = 0.0;
  // -1 for curves shared by all repetitions (the theoretical one).
  int repetition = -1;
  int m = 0;
  int e = 0;
  std::uint64_t complexity = 0;
};

struct PowerCurve {
  std::vector<PowerPoint> points;
  CurveMeta meta;
};

// Throws std::invalid_argument unless every alpha is in (0, 1) and the grid
// is strictly increasing.
void check_alpha_grid(std::span<const double> alphas);

// For each alpha: the fraction of `member_llr` strictly above tau(alpha)
// computed from `null_llr`.
std::vector<PowerPoint> power_points(const EmpiricalDistribution& null_llr,
                                     std::span<const double> member_llr,
                                     std::span<const double> alphas);

// Calibrates on r for every alpha and measures the true positive rate on t.
PowerCurve evaluate(const AttackModel& model, const Population& t, const Population& r,
                    std::span<const double> alphas);

// beta = Phi( sqrt(c / t_size) - z_alpha ), z_alpha the upper-tail quantile.
double theoretical_power(double c, std::size_t t_size, double alpha);

// k levels spaced evenly in log between lo and hi, both inclusive.
std::vector<double> log_spaced_alphas(double lo, double hi, std::size_t k);

}  // namespace ctrace
