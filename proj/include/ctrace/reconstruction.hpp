#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ctrace/bayesnet.hpp"
#include "ctrace/credalnet.hpp"

namespace ctrace {

enum class ReconstructionFailure { not_idm, infinite_count, not_contamination, unrecoverable };

class ReconstructionError : public std::runtime_error {
 public:
  ReconstructionError(ReconstructionFailure failure, const std::string& what)
      : std::runtime_error(what), failure_(failure) {}
  ReconstructionFailure failure() const { return failure_; }

 private:
  ReconstructionFailure failure_;
};

// Recovered counts are snapped to the nearest integer when within this
// distance of it.
inline constexpr double kIntegerSnapTolerance = 1e-6;
// Width comparisons in recovery and classification.
inline constexpr double kWidthTolerance = 1e-9;

struct IdmRecovery {
  BayesNet bn;
  // n_j per variable, one entry per parent configuration.
  std::vector<std::vector<double>> row_totals;
  // n_ij per variable, laid out like Cpt::table.
  std::vector<std::vector<double>> entry_counts;
  // |T|, read off the first root variable in topological order.
  double sample_size = 0.0;
  // False if any recovered count was not within kIntegerSnapTolerance of an
  // integer (the counts are then reported unrounded).
  bool integral = true;
};

// Inverts the local IDM given its hyperparameter: a row of width w gives
// n_j = s (1 - w) / w and n_ij = lower (n_j + s).
IdmRecovery recover_from_idm(const CredalNet& cn, double s);

struct ContaminationRecovery {
  BayesNet bn;
  double eps = 0.0;
};

// Inverts eps-contamination: eps is the common width, p = lower / (1 - eps).
ContaminationRecovery recover_from_contamination(const CredalNet& cn);

enum class CnClass { singleton, vacuous, contamination_like, idm_like, unknown };

std::string to_string(CnClass c);

struct CnClassification {
  CnClass kind = CnClass::unknown;
  // contamination_like: the common width.
  double eps = 0.0;
  // idm_like: the hyperparameter is not identifiable from widths alone, only
  // the ratio law width * (n_j + s) = s. Reported per variable X and row j
  // as n_j / s_X = (1 - w) / w, and per variable as N / s_X.
  std::vector<std::vector<double>> count_to_s_ratio;
  std::vector<double> sample_to_s_ratio;
  // idm_like: N / s_X agrees across variables, consistent with one global s.
  bool uniform_s = false;
};

CnClassification classify_cn(const CredalNet& cn);

}  // namespace ctrace
