#include "ctrace/reconstruction.hpp"

#include <cmath>
#include <optional>

namespace ctrace {

namespace {

double snap(double x, bool& integral) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kIntegerSnapTolerance) return r;
  integral = false;
  return x;
}

// Common width of a row whose intervals all have the same width and whose
// lowers sum to 1 - width. Empty if the row does not have that shape.
std::optional<double> regular_width(std::span<const Interval> row) {
  double mean = 0.0;
  double sum_lower = 0.0;
  for (const auto& iv : row) {
    mean += iv.width();
    sum_lower += iv.lower;
  }
  mean /= static_cast<double>(row.size());
  for (const auto& iv : row) {
    if (std::abs(iv.width() - mean) > kWidthTolerance) return std::nullopt;
  }
  if (std::abs(sum_lower - (1.0 - mean)) > kWidthTolerance) return std::nullopt;
  return mean;
}

}  // namespace

std::string to_string(CnClass c) {
  switch (c) {
    case CnClass::singleton: return "singleton";
    case CnClass::vacuous: return "vacuous";
    case CnClass::contamination_like: return "contamination_like";
    case CnClass::idm_like: return "idm_like";
    case CnClass::unknown: return "unknown";
  }
  return "unknown";
}

IdmRecovery recover_from_idm(const CredalNet& cn, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("recover_from_idm: s must be > 0");
  const Dag& g = cn.dag();
  std::vector<Cpt> cpts;
  std::vector<std::vector<double>> row_totals(g.size());
  std::vector<std::vector<double>> entry_counts(g.size());
  bool integral = true;

  for (const auto& icpt : cn.icpts()) {
    const int v = icpt.variable;
    const int k = icpt.cardinality;
    Cpt cpt{v, k, std::vector<double>(icpt.table.size(), 0.0)};
    row_totals[v].resize(icpt.num_rows());
    entry_counts[v].resize(icpt.table.size());
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      const auto row = icpt.row(j);
      const auto w = regular_width(row);
      if (!w) {
        throw ReconstructionError(ReconstructionFailure::not_idm,
                                  "variable " + std::to_string(v) + ", row " + std::to_string(j) +
                                      ": interval widths are not those of an IDM row");
      }
      if (*w <= 1e-15) {
        throw ReconstructionError(ReconstructionFailure::infinite_count,
                                  "variable " + std::to_string(v) + ", row " + std::to_string(j) +
                                      ": zero width implies an infinite count");
      }
      const double nj = snap(s * (1.0 - *w) / *w, integral);
      row_totals[v][j] = nj;
      for (int i = 0; i < k; ++i) {
        const double nij = snap(row[i].lower * (nj + s), integral);
        entry_counts[v][j * k + i] = nij;
        cpt.table[j * k + i] = nj == 0.0 ? 1.0 / k : nij / nj;
      }
    }
    cpts.push_back(std::move(cpt));
  }

  const int root = g.topo_order().front();
  const double sample_size = row_totals[root].front();
  return IdmRecovery{BayesNet(cn.shared_dag(), std::move(cpts)), std::move(row_totals),
                     std::move(entry_counts), sample_size, integral};
}

ContaminationRecovery recover_from_contamination(const CredalNet& cn) {
  double eps = 0.0;
  std::size_t entries = 0;
  for (const auto& icpt : cn.icpts()) {
    for (const auto& iv : icpt.table) eps += iv.width();
    entries += icpt.table.size();
  }
  eps /= static_cast<double>(entries);

  for (const auto& icpt : cn.icpts()) {
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      double sum_lower = 0.0;
      for (const auto& iv : icpt.row(j)) {
        if (std::abs(iv.width() - eps) > kWidthTolerance) {
          throw ReconstructionError(ReconstructionFailure::not_contamination,
                                    "variable " + std::to_string(icpt.variable) +
                                        ": interval widths differ across the network");
        }
        sum_lower += iv.lower;
      }
      if (std::abs(sum_lower - (1.0 - eps)) > kWidthTolerance) {
        throw ReconstructionError(ReconstructionFailure::not_contamination,
                                  "variable " + std::to_string(icpt.variable) + ", row " +
                                      std::to_string(j) + ": lowers do not sum to 1 - eps");
      }
    }
  }
  if (eps >= 1.0 - 1e-12) {
    throw ReconstructionError(ReconstructionFailure::unrecoverable,
                              "eps is 1: the intervals carry no information about the network");
  }

  std::vector<Cpt> cpts;
  for (const auto& icpt : cn.icpts()) {
    Cpt cpt{icpt.variable, icpt.cardinality, std::vector<double>(icpt.table.size())};
    for (std::size_t k = 0; k < icpt.table.size(); ++k) {
      cpt.table[k] = icpt.table[k].lower / (1.0 - eps);
    }
    cpts.push_back(std::move(cpt));
  }
  return ContaminationRecovery{BayesNet(cn.shared_dag(), std::move(cpts)), eps};
}

CnClassification classify_cn(const CredalNet& cn) {
  CnClassification out;
  bool vacuous = true;
  bool singleton = true;
  for (const auto& icpt : cn.icpts()) {
    for (const auto& iv : icpt.table) {
      vacuous = vacuous && iv.lower <= 1e-12 && iv.upper >= 1.0 - 1e-12;
      singleton = singleton && iv.width() <= 1e-12;
    }
  }
  if (vacuous) {
    out.kind = CnClass::vacuous;
    return out;
  }
  if (singleton) {
    out.kind = CnClass::singleton;
    return out;
  }

  std::vector<std::vector<double>> widths(cn.icpts().size());
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& icpt : cn.icpts()) {
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      const auto w = regular_width(icpt.row(j));
      if (!w) return out;
      widths[icpt.variable].push_back(*w);
      lo = std::min(lo, *w);
      hi = std::max(hi, *w);
    }
  }
  if (hi - lo <= kWidthTolerance) {
    out.kind = CnClass::contamination_like;
    out.eps = 0.5 * (lo + hi);
    return out;
  }
  if (lo <= 1e-15) return out;

  out.kind = CnClass::idm_like;
  for (const auto& row_widths : widths) {
    std::vector<double> ratios;
    double total = 0.0;
    for (double w : row_widths) {
      ratios.push_back((1.0 - w) / w);
      total += ratios.back();
    }
    out.count_to_s_ratio.push_back(std::move(ratios));
    out.sample_to_s_ratio.push_back(total);
  }
  const double first = out.sample_to_s_ratio.front();
  out.uniform_s = true;
  for (double r : out.sample_to_s_ratio) {
    if (std::abs(r - first) > 1e-6 * std::max(1.0, std::abs(first))) out.uniform_s = false;
  }
  return out;
}

}  // namespace ctrace
