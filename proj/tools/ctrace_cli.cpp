// ctrace: command-line front end for the library.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctrace/attack.hpp"
#include "ctrace/bayesnet.hpp"
#include "ctrace/credalnet.hpp"
#include "ctrace/experiment.hpp"
#include "ctrace/graph.hpp"
#include "ctrace/model_io.hpp"
#include "ctrace/reconstruction.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctrace;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr const char* kSeedVariable = "CTRACE_SEED";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CTRACE_SEED, when set, replaces the built-in default seed.
std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedVariable);
  if (!env || !*env) return kDefaultSeed;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(kSeedVariable) + " must be an unsigned integer");
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
}

BayesNet read_bn(const fs::path& path) {
  auto model = read_model(path);
  if (auto* bn = std::get_if<BayesNet>(&model)) return std::move(*bn);
  throw UsageError(path.string() + ": expected a BN model, found a CN");
}

CredalNet read_cn(const fs::path& path) {
  auto model = read_model(path);
  if (auto* cn = std::get_if<CredalNet>(&model)) return std::move(*cn);
  throw UsageError(path.string() + ": expected a CN model, found a BN");
}

Population read_population_for(const Dag& g, const fs::path& path) {
  auto d = read_population(path);
  try {
    check_schema(g, d);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return d;
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
  int nodes = 0;
  int density = 0;
  int cardinality = 2;
  std::size_t pop = 10000;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

void run_generate(const GenerateArgs& a) {
  const Seed seed{a.seed.value_or(default_seed())};
  std::shared_ptr<const Dag> g;
  try {
    g = std::make_shared<const Dag>(
        random_dag(a.nodes, a.density, a.cardinality, derive_seed(seed, {0})));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const BayesNet bn = random_parameters(g, derive_seed(seed, {1}));
  const Population p = forward_sample(bn, a.pop, derive_seed(seed, {2}));
  ensure_dir(a.out);
  write_model(a.out / "model.json", bn);
  write_population(a.out / "population.csv", p);
  std::cout << "wrote " << (a.out / "model.json").string() << " (complexity "
            << complexity(*g) << ") and " << (a.out / "population.csv").string() << " ("
            << p.size() << " rows)\n";
}

// --- learn ----------------------------------------------------------------

struct LearnArgs {
  fs::path data;
  fs::path structure;
  std::string method = "mle";
  std::optional<double> s;
  fs::path out;
};

void run_learn(const LearnArgs& a) {
  if (a.method == "dirichlet" && !a.s) throw UsageError("--method dirichlet requires --s");
  if (a.method == "mle" && a.s) throw UsageError("--s applies only to --method dirichlet");
  if (a.s && !(*a.s > 0.0)) throw UsageError("--s must be > 0");
  const Dag g = read_dag(a.structure);
  const Population d = read_population_for(g, a.data);
  const BayesNet bn = a.method == "mle" ? mle(g, d) : dirichlet_estimate(g, d, *a.s);
  write_model(a.out, bn);
}

// --- mask -----------------------------------------------------------------

struct MaskArgs {
  fs::path model;
  std::string method;
  std::optional<double> s;
  std::optional<double> eps;
  std::optional<fs::path> data;
  fs::path out;
};

void run_mask(const MaskArgs& a) {
  if (a.method == "idm") {
    if (!a.data) throw UsageError("--method idm requires --data");
    if (!a.s) throw UsageError("--method idm requires --s");
    if (a.eps) throw UsageError("--eps applies only to --method contaminate");
    if (!(*a.s > 0.0)) throw UsageError("--s must be > 0");
    const Dag g = read_dag(a.model);
    const Population d = read_population_for(g, *a.data);
    write_model(a.out, idm_from_data(g, d, *a.s));
    return;
  }
  if (!a.eps) throw UsageError("--method contaminate requires --eps");
  if (a.s || a.data) throw UsageError("--s and --data apply only to --method idm");
  if (!(*a.eps > 0.0 && *a.eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  write_model(a.out, contaminate(read_bn(a.model), *a.eps));
}

// --- attack ---------------------------------------------------------------

struct AttackArgs {
  fs::path released;
  fs::path reference;
  fs::path probe;
  std::vector<double> alphas{0.05};
  std::size_t credal_points = 500;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

void run_attack(const AttackArgs& a) {
  for (double alpha : a.alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw UsageError("--alpha values must lie in (0, 1), got " + format_double(alpha));
    }
  }
  if (a.credal_points == 0) throw UsageError("--credal-points must be >= 1");
  auto released = read_model(a.released);
  const Dag& g = std::visit([](const auto& m) -> const Dag& { return m.dag(); }, released);
  const Population r = read_population_for(g, a.reference);
  const Population probe = read_population_for(g, a.probe);

  BayesNet reference = mle(g, r);
  AttackModel model;
  if (auto* bn = std::get_if<BayesNet>(&released)) {
    model = make_attack_model(ModelKind::bn, *bn, std::move(reference));
  } else {
    const Seed seed{a.seed.value_or(default_seed())};
    const auto& cn = std::get<CredalNet>(released);
    model = make_attack_model(ModelKind::cn, constrained_mle(cn, r, a.credal_points, seed),
                              std::move(reference));
  }

  const EmpiricalDistribution null_llr(llr_all(model, r));
  const auto probe_llr = llr_all(model, probe);
  std::string decisions = "row,alpha,llr,member\n";
  std::string summary = "alpha,tau,flagged,flag_rate\n";
  for (double alpha : a.alphas) {
    const double tau = threshold(null_llr, alpha);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < probe_llr.size(); ++i) {
      const bool member = probe_llr[i] > tau;
      flagged += member;
      decisions += std::to_string(i) + "," + format_double(alpha) + "," +
                   format_double(probe_llr[i]) + "," + (member ? "1" : "0") + "\n";
    }
    const double rate =
        probe_llr.empty() ? 0.0 : static_cast<double>(flagged) / static_cast<double>(probe_llr.size());
    summary += format_double(alpha) + "," + format_double(tau) + "," + std::to_string(flagged) +
               "," + format_double(rate) + "\n";
  }
  ensure_dir(a.out);
  write_file(a.out / "decisions.csv", decisions);
  write_file(a.out / "summary.csv", summary);
  std::cout << summary;
}

// --- audit ----------------------------------------------------------------

struct AuditArgs {
  fs::path model;
  std::optional<double> s;
};

void run_audit(const AuditArgs& a) {
  if (a.s && !(*a.s > 0.0)) throw UsageError("--s must be > 0");
  const CredalNet cn = read_cn(a.model);
  const auto cls = classify_cn(cn);
  json report{{"classification", to_string(cls.kind)}};
  switch (cls.kind) {
    case CnClass::contamination_like: {
      report["eps"] = cls.eps;
      const auto rec = recover_from_contamination(cn);
      report["recovered"] = {{"eps", rec.eps}, {"bn", to_json(rec.bn)}};
      break;
    }
    case CnClass::idm_like: {
      report["uniform_s"] = cls.uniform_s;
      report["sample_to_s_ratio"] = cls.sample_to_s_ratio;
      report["count_to_s_ratio"] = cls.count_to_s_ratio;
      if (!a.s) break;
      try {
        const auto rec = recover_from_idm(cn, *a.s);
        report["recovered"] = {{"s", *a.s},
                               {"sample_size", rec.sample_size},
                               {"integral", rec.integral},
                               {"row_totals", rec.row_totals},
                               {"bn", to_json(rec.bn)}};
      } catch (const ReconstructionError& e) {
        report["recovery_error"] = e.what();
      }
      break;
    }
    default:
      break;
  }
  std::cout << report.dump(1) << "\n";
}

// --- experiment and report ------------------------------------------------

struct ExperimentArgs {
  std::optional<fs::path> config;
  fs::path out;
  std::optional<int> workers;
};

void run_experiment(const ExperimentArgs& a) {
  json j = json::object();
  if (a.config) {
    std::ifstream in(*a.config);
    if (!in) throw std::runtime_error(a.config->string() + ": cannot open");
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError({a.config->string() + ": " + e.what()});
    }
  }
  if (j.is_object() && !j.contains("seed")) j["seed"] = default_seed();
  ExperimentConfig cfg = config_from_json(j);
  if (a.workers) {
    cfg.workers = *a.workers;
    validate(cfg);
  }
  const auto result = run_all(cfg);
  export_result(result, a.out);
  write_file(a.out / "config.json", to_json(cfg).dump(1) + "\n");
  std::cout << report_markdown(result);
}

struct ReportArgs {
  fs::path in;
  std::optional<fs::path> out;
};

void run_report(const ReportArgs& a) {
  const auto result = read_result(a.in);
  const fs::path out = a.out.value_or(a.in);
  ensure_dir(out);
  write_file(out / "aggregate.csv", aggregate_csv(aggregate(result.curves)));
  write_file(out / "report.md", report_markdown(result));
  std::cout << report_markdown(result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tracing attacks against Bayesian and credal networks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Random DAG, ground-truth BN and population");
  generate->add_option("--nodes", gen.nodes, "Number of variables")->required()->check(CLI::PositiveNumber);
  generate->add_option("--density", gen.density, "Edges per node")->required()->check(CLI::PositiveNumber);
  generate->add_option("--cardinality", gen.cardinality, "States per variable")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  generate->add_option("--pop", gen.pop, "Population size")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Seed (default: $CTRACE_SEED or built-in)");
  generate->add_option("--out", gen.out, "Output directory")->required();

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "Estimate BN parameters from data");
  learn->add_option("--data", learn_args.data, "Population CSV")->required()->check(CLI::ExistingFile);
  learn->add_option("--structure", learn_args.structure, "Model file providing the DAG")->required()->check(CLI::ExistingFile);
  learn->add_option("--method", learn_args.method, "mle or dirichlet")->capture_default_str()->check(CLI::IsMember({"mle", "dirichlet"}));
  learn->add_option("--s", learn_args.s, "Total pseudo-count per row (dirichlet)");
  learn->add_option("--out", learn_args.out, "Output BN model file")->required();

  MaskArgs mask_args;
  auto* mask = app.add_subcommand("mask", "Turn a BN into a CN");
  mask->add_option("--model", mask_args.model, "BN model file")->required()->check(CLI::ExistingFile);
  mask->add_option("--method", mask_args.method, "idm or contaminate")->required()->check(CLI::IsMember({"idm", "contaminate"}));
  mask->add_option("--s", mask_args.s, "IDM hyperparameter");
  mask->add_option("--eps", mask_args.eps, "Contamination level");
  mask->add_option("--data", mask_args.data, "Population CSV (idm)")->check(CLI::ExistingFile);
  mask->add_option("--out", mask_args.out, "Output CN model file")->required();

  AttackArgs attack_args;
  auto* attack = app.add_subcommand("attack", "Run the tracing attack on probe individuals");
  attack->add_option("--released", attack_args.released, "Released BN or CN model file")->required()->check(CLI::ExistingFile);
  attack->add_option("--reference", attack_args.reference, "Attacker's reference population")->required()->check(CLI::ExistingFile);
  attack->add_option("--probe", attack_args.probe, "Individuals to test")->required()->check(CLI::ExistingFile);
  attack->add_option("--alpha", attack_args.alphas, "Type I error levels (comma separated)")->delimiter(',')->capture_default_str();
  attack->add_option("--credal-points", attack_args.credal_points, "Sampled points for a released CN")->capture_default_str();
  attack->add_option("--seed", attack_args.seed, "Seed (default: $CTRACE_SEED or built-in)");
  attack->add_option("--out", attack_args.out, "Output directory")->required();

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "Classify a CN and try to recover the BN behind it");
  audit->add_option("--model", audit_args.model, "CN model file")->required()->check(CLI::ExistingFile);
  audit->add_option("--s", audit_args.s, "Assumed IDM hyperparameter");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run the power-curve experiment grid");
  experiment->add_option("--config", exp_args.config, "JSON config (default: built-in)")->check(CLI::ExistingFile);
  experiment->add_option("--out", exp_args.out, "Output directory")->required();
  experiment->add_option("--workers", exp_args.workers, "Worker threads");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Rebuild aggregate.csv and report.md from raw results");
  report->add_option("--in", report_args.in, "Experiment output directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_args.out, "Directory for the rebuilt files (default: --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) run_generate(gen);
    if (learn->parsed()) run_learn(learn_args);
    if (mask->parsed()) run_mask(mask_args);
    if (attack->parsed()) run_attack(attack_args);
    if (audit->parsed()) run_audit(audit_args);
    if (experiment->parsed()) run_experiment(exp_args);
    if (report->parsed()) run_report(report_args);
  } catch (const UsageError& e) {
    std::cerr << "ctrace: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "ctrace: invalid config:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "ctrace: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
