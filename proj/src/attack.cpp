#include "ctrace/attack.hpp"

#include <cmath>
#include <stdexcept>

namespace ctrace {

AttackModel make_attack_model(ModelKind kind, BayesNet target, BayesNet reference) {
  if (!target.dag().same_structure(reference.dag())) {
    throw std::invalid_argument("attack model: target and reference differ in structure");
  }
  return AttackModel{kind, std::make_shared<const BayesNet>(std::move(target)),
                     std::make_shared<const BayesNet>(std::move(reference))};
}

double llr(const AttackModel& model, std::span<const int> x) {
  return log_joint(*model.target, x) - log_joint(*model.reference, x);
}

std::vector<double> llr_all(const AttackModel& model, const FamilyIndex& index) {
  auto target = log_joint_all(*model.target, index);
  const auto reference = log_joint_all(*model.reference, index);
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= reference[i];
  return target;
}

std::vector<double> llr_all(const AttackModel& model, const Population& d) {
  return llr_all(model, FamilyIndex(model.target->dag(), d));
}

double threshold(const EmpiricalDistribution& null_llr, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("threshold: alpha must lie in (0, 1)");
  }
  return empirical_quantile(null_llr, 1.0 - alpha);
}

CalibratedTest calibrate(const AttackModel& model, const Population& null_sample, double alpha) {
  if (null_sample.empty()) throw std::invalid_argument("calibrate: empty null sample");
  const EmpiricalDistribution null_llr(llr_all(model, null_sample));
  return CalibratedTest{model, alpha, threshold(null_llr, alpha)};
}

Decision decide(const CalibratedTest& test, std::span<const int> x) {
  return llr(test.model, x) > test.tau ? Decision::member : Decision::non_member;
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::bn_empirical: return "BN";
    case CurveKind::cn_empirical: return "CN";
    case CurveKind::theoretical: return "theoretical";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "BN") return CurveKind::bn_empirical;
  if (s == "CN") return CurveKind::cn_empirical;
  if (s == "theoretical") return CurveKind::theoretical;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

void check_alpha_grid(std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("alpha grid is empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] < 1.0)) {
      throw std::invalid_argument("alpha " + std::to_string(alphas[i]) + " is outside (0, 1)");
    }
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      throw std::invalid_argument("alpha grid is not strictly increasing");
    }
  }
}

std::vector<PowerPoint> power_points(const EmpiricalDistribution& null_llr,
                                     std::span<const double> member_llr,
                                     std::span<const double> alphas) {
  check_alpha_grid(alphas);
  if (member_llr.empty()) throw std::invalid_argument("power_points: no member statistics");
  std::vector<PowerPoint> points;
  points.reserve(alphas.size());
  for (double alpha : alphas) {
    const double tau = threshold(null_llr, alpha);
    std::size_t flagged = 0;
    for (double l : member_llr) flagged += l > tau;
    points.push_back({alpha, static_cast<double>(flagged) / static_cast<double>(member_llr.size())});
  }
  return points;
}

PowerCurve evaluate(const AttackModel& model, const Population& t, const Population& r,
                    std::span<const double> alphas) {
  if (t.empty() || r.empty()) throw std::invalid_argument("evaluate: empty population");
  const EmpiricalDistribution null_llr(llr_all(model, r));
  const auto member_llr = llr_all(model, t);
  PowerCurve curve;
  curve.points = power_points(null_llr, member_llr, alphas);
  curve.meta.kind = model.kind == ModelKind::bn ? CurveKind::bn_empirical : CurveKind::cn_empirical;
  return curve;
}

double theoretical_power(double c, std::size_t t_size, double alpha) {
  if (!(c >= 1.0)) throw std::domain_error("theoretical_power: complexity must be >= 1");
  if (t_size == 0) throw std::domain_error("theoretical_power: target size must be >= 1");
  return std_normal_cdf(std::sqrt(c / static_cast<double>(t_size)) - std_normal_quantile(alpha));
}

std::vector<double> log_spaced_alphas(double lo, double hi, std::size_t k) {
  if (!(lo > 0.0 && hi < 1.0 && lo < hi) || k < 2) {
    throw std::invalid_argument("log_spaced_alphas: need 0 < lo < hi < 1 and k >= 2");
  }
  std::vector<double> out(k);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace ctrace
