#pragma once

#include <span>
#include <vector>

namespace ctrace {

// Phi(x), via erfc for accuracy in both tails.
double std_normal_cdf(double x);

// Upper-tail quantile: returns z with P(Z > z) = s for Z ~ N(0, 1), i.e. the
// (1 - s)-quantile. Acklam's rational approximation followed by one Halley
// step on the erfc-based CDF. Throws std::domain_error unless 0 < s < 1.
double std_normal_quantile(double s);

// Sorted sample of a real-valued statistic.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

 private:
  std::vector<double> samples_;
};

// "Higher" order statistic: the smallest sample v with F_n(v) >= q. At most
// ceil((1 - q) n) samples exceed the returned value.
double empirical_quantile(const EmpiricalDistribution& d, double q);

}  // namespace ctrace
