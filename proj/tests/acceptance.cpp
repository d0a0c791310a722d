// Acceptance checks. `acceptance --criterion N` runs one; no argument runs
// all. Each prints one "criterion N: PASS|FAIL ..." line.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "ctrace/experiment.hpp"
#include "ctrace/reconstruction.hpp"
#include "support.hpp"

using namespace ctrace;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

ExperimentConfig reduced_grid() {
  ExperimentConfig cfg;
  cfg.m_values = {10, 20};
  cfg.e_values = {1, 2};
  cfg.s_values = {1.0, 1000.0};
  cfg.workers = workers();
  return cfg;
}

Outcome theory_adherence() {
  ExperimentConfig cfg;
  cfg.m_values = {10};
  cfg.e_values = {1};
  cfg.workers = workers();
  const auto checks = summarize(run_all(cfg));
  const double dev = checks.front().bn_theory_deviation;
  return {dev <= 0.10, "mean |beta_BN - theory| = " + fixed(dev) + " (bound 0.10)"};
}

Outcome power_ordering() {
  bool pass = true;
  std::string details;
  for (const auto& c : summarize(run_all(reduced_grid()))) {
    const bool ok = c.ordering_slack <= kOrderingSlack;
    pass = pass && ok;
    details += "m=" + std::to_string(c.m) + ",e=" + std::to_string(c.e) + ",s=" +
               format_double(c.s) + ": " + fixed(c.ordering_slack) + (ok ? "" : " (over)") + "; ";
  }
  return {pass, "max_alpha (beta_CN - beta_BN) per cell, bound 0.05: " + details};
}

Outcome headline_gap() {
  ExperimentConfig cfg;
  cfg.m_values = {100};
  cfg.e_values = {4};
  cfg.workers = workers();
  const double alpha = 1e-4;
  if (std::abs(cfg.alpha_grid.front() - alpha) > 1e-15) {
    return {false, "alpha grid does not start at 1e-4"};
  }
  bool pass = true;
  std::string details;
  for (const auto& row : aggregate(run_all(cfg).curves)) {
    if (row.alpha != cfg.alpha_grid.front()) continue;
    if (row.kind == CurveKind::bn_empirical) {
      const bool ok = row.mean_beta >= 0.45 && row.mean_beta <= 0.75;
      pass = pass && ok;
      details += "beta_BN = " + fixed(row.mean_beta) + (ok ? " in" : " outside") + " [0.45, 0.75]; ";
    } else if (row.kind == CurveKind::cn_empirical) {
      const bool ok = row.mean_beta <= 0.15;
      pass = pass && ok;
      details += "beta_CN(s=" + format_double(row.s_or_eps) + ") = " + fixed(row.mean_beta) +
                 (ok ? " <= 0.15" : " > 0.15") + "; ";
    } else {
      details += "theory = " + fixed(row.mean_beta) + "; ";
    }
  }
  return {pass, "m=100, e=4, alpha=1e-4, 20 reps: " + details};
}

Outcome consistency() {
  bool pass = true;
  std::string details;
  for (const auto& c : summarize(run_all(reduced_grid()))) {
    const bool ok = c.consistency <= kConsistencyBound;
    pass = pass && ok;
    details += "m=" + std::to_string(c.m) + ",e=" + std::to_string(c.e) + ",s=" +
               format_double(c.s) + ": " + fixed(c.consistency) + (ok ? "" : " (over)") + "; ";
  }
  return {pass, "mean CN-not-BN share of T per cell, bound 0.05: " + details};
}

Outcome reconstruction() {
  Rng rng(Seed{5005});
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  double worst_entry = 0.0;
  double worst_eps = 0.0;
  const double s_choices[] = {1.0, 10.0, 1000.0};
  for (int i = 0; i < 100; ++i) {
    const Dag g = test::random_small_dag(rng, 2 + static_cast<int>(rng.below(7)), 3);
    const std::size_t n = 1 + rng.below(1000);
    const Population d = forward_sample(random_parameters(g, Seed{rng.next()}), n, Seed{rng.next()});
    const double s = s_choices[i % 3];
    try {
      const auto rec = recover_from_idm(idm_from_data(g, d, s), s);
      const BayesNet ml = mle(g, d);
      const auto counts = count_families(g, d);
      bool ok = rec.sample_size == static_cast<double>(n) && rec.integral;
      for (const auto& v : g.variables()) {
        for (std::size_t k = 0; k < ml.cpt(v.id).table.size(); ++k) {
          const double diff = std::abs(rec.bn.cpt(v.id).table[k] - ml.cpt(v.id).table[k]);
          worst_entry = std::max(worst_entry, diff);
          ok = ok && diff <= 1e-9 && rec.entry_counts[v.id][k] == counts.per_variable[v.id][k];
        }
      }
      failures += !ok;
    } catch (const ReconstructionError&) {
      ++failures;
    }
  }
  for (int i = 0; i < 100; ++i) {
    const Dag g = test::random_small_dag(rng, 2 + static_cast<int>(rng.below(7)), 3);
    const BayesNet bn = random_parameters(g, Seed{rng.next()});
    const double eps = rng.uniform(0.001, 0.999);
    try {
      const auto rec = recover_from_contamination(contaminate(bn, eps));
      bool ok = std::abs(rec.eps - eps) <= 1e-12;
      worst_eps = std::max(worst_eps, std::abs(rec.eps - eps));
      for (const auto& v : g.variables()) {
        for (std::size_t k = 0; k < bn.cpt(v.id).table.size(); ++k) {
          const double diff = std::abs(rec.bn.cpt(v.id).table[k] - bn.cpt(v.id).table[k]);
          worst_entry = std::max(worst_entry, diff);
          ok = ok && diff <= 1e-9;
        }
      }
      failures += !ok;
    } catch (const ReconstructionError&) {
      ++failures;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = failures == 0 && seconds <= 30.0;
  return {pass, "200 instances, " + std::to_string(failures) + " failures, worst entry error " +
                    std::to_string(worst_entry) + ", worst eps error " + std::to_string(worst_eps) +
                    ", " + fixed(seconds, 2) + " s"};
}

Outcome constrained_mle_oracle() {
  Rng rng(Seed{6006});
  const Dag g = test::make_dag(2, {{0, 1}});
  double worst = -INFINITY;
  bool finite = true;
  for (int i = 0; i < 50; ++i) {
    const BayesNet truth = random_parameters(g, Seed{rng.next()});
    const Population t = forward_sample(truth, 20 + rng.below(281), Seed{rng.next()});
    const Population r = forward_sample(truth, 100 + rng.below(900), Seed{rng.next()});
    const double s = std::exp(rng.uniform(std::log(1.0), std::log(1000.0)));
    const CredalNet cn = idm_from_data(g, t, s);
    const BayesNet k = constrained_mle(cn, r, 500, Seed{rng.next()});
    const double grid = test::grid_best_loglik(cn, r, 1e-3);
    finite = finite && std::isfinite(grid);
    const double gap = (grid - log_likelihood(k, r)) / static_cast<double>(r.size());
    worst = std::max(worst, gap);
  }
  return {finite && worst <= 0.01,
          "50 instances, worst per-datum gap to the 1e-3 grid optimum " + fixed(worst, 6) +
              " (bound 0.01)"};
}

Outcome property_suite(const char* argv0) {
  doctest::Context ctx;
  const char* args[] = {argv0, "--test-suite=properties", "--no-version", "--minimal"};
  ctx.applyCommandLine(4, args);
  const int rc = ctx.run();
  return {rc == 0, rc == 0 ? "property suite green" : "property suite has failures"};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.m_values = {10, 20};
  cfg.e_values = {1, 2};
  cfg.pop_size = 2000;
  cfg.ref_size = 1000;
  cfg.target_size = 100;
  cfg.repetitions = 5;
  cfg.workers = workers();
  const auto a = run_all(cfg);
  cfg.workers = 1;
  const auto b = run_all(cfg);
  const fs::path root = fs::temp_directory_path() / "ctrace_acceptance_determinism";
  fs::remove_all(root);
  export_result(a, root / "a");
  export_result(b, root / "b");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool same = raw_csv(a) == raw_csv(b) && diagnostics_csv(a) == diagnostics_csv(b) &&
              aggregate_csv(aggregate(a.curves)) == aggregate_csv(aggregate(b.curves));
  for (const char* f : {"raw.csv", "aggregate.csv", "diagnostics.csv"}) {
    same = same && slurp(root / "a" / f) == slurp(root / "b" / f) && !slurp(root / "a" / f).empty();
  }
  return {same, same ? "two runs gave byte-identical raw, aggregate and diagnostics CSVs"
                     : "CSV outputs differ between runs"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (only < 0 || only > 8) {
    std::cerr << "criterion must be 1..8\n";
    return 2;
  }

  const std::function<Outcome()> criteria[] = {
      theory_adherence, power_ordering,   headline_gap,
      consistency,      reconstruction,   constrained_mle_oracle,
      [&] { return property_suite(argv[0]); },
      determinism};

  bool all = true;
  for (int n = 1; n <= 8; ++n) {
    if (only && n != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[n - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << n << ": " << (out.pass ? "PASS" : "FAIL") << " " << out.details
              << " [" << fixed(seconds, 1) << " s]" << std::endl;
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
