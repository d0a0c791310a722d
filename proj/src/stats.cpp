#include "ctrace/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctrace {

namespace {

// Lower-tail inverse CDF, relative error ~1.15e-9 before refinement.
double acklam_inverse_cdf(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  constexpr double p_high = 1.0 - p_low;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > p_high) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::domain_error("std_normal_quantile: level must lie in (0, 1)");
  }
  if (s == 0.5) return 0.0;
  // z_s = -Phi^{-1}(s); refine x = Phi^{-1}(s) with one Halley step.
  double x = acklam_inverse_cdf(s);
  const double e = std_normal_cdf(x) - s;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return -x;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end());
}

double empirical_quantile(const EmpiricalDistribution& d, double q) {
  if (d.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("empirical_quantile: level must lie in [0, 1]");
  }
  const auto n = static_cast<double>(d.size());
  // Rank k (1-based) is the smallest with k / n >= q. The slack absorbs
  // representation error in q * n (e.g. 0.95 * 100).
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9 * n));
  k = std::clamp<std::size_t>(k, 1, d.size());
  return d.samples()[k - 1];
}

}  // namespace ctrace
