#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhloc/async_solver.hpp"
#include "rhloc/bounds.hpp"
#include "rhloc/harness.hpp"
#include "rhloc/random.hpp"
#include "rhloc/scenario_io.hpp"
#include "rhloc/sync_solver.hpp"

namespace rhloc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct NetworkFlags {
  std::string scenario;
  int nodes = 10;
  int dim = 2;
  double radius = 0.5;
  double side = 1.0;
  std::string anchors = "corners";
  double huber_radius = 0.1;
};

struct NoiseFlags {
  std::string model = "gaussian";
  double sigma = 0.04;
  std::vector<int> faulty;
  double sigma_outlier = 4.0;
  double bias_factor = 0.1;
};

void add_generator_flags(CLI::App* cmd, NetworkFlags& f) {
  cmd->add_option("--nodes", f.nodes, "Number of sensors")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--dim", f.dim, "Embedding dimension")->check(CLI::Range(1, kMaxDim))->capture_default_str();
  cmd->add_option("--radius", f.radius, "Communication radius")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--side", f.side, "Side of the deployment cube")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--anchors", f.anchors, "Anchor layout")->check(CLI::IsMember({"corners"}))->capture_default_str();
  cmd->add_option("--huber-radius", f.huber_radius, "Huber radius R of every measurement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_noise_flags(CLI::App* cmd, NoiseFlags& f) {
  cmd->add_option("--noise", f.model, "Noise model")
      ->check(CLI::IsMember({"gaussian", "outlier", "bias"}))
      ->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Regular noise standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--faulty", f.faulty, "Faulty sensors (outlier and bias models)");
  cmd->add_option("--sigma-outlier", f.sigma_outlier, "Noise standard deviation of faulty sensors")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--bias-factor", f.bias_factor, "Faulty sensors report this times the distance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

NoiseModel make_noise(const NoiseFlags& f) {
  if (f.model == "outlier") return OutlierNoise{f.sigma, f.faulty, f.sigma_outlier};
  if (f.model == "bias") return BiasNoise{f.sigma, f.faulty, f.bias_factor};
  return GaussianNoise{f.sigma};
}

GeneratorConfig make_generator(const NetworkFlags& f) {
  GeneratorConfig g;
  g.sensors = f.nodes;
  g.dim = f.dim;
  g.area_side = f.side;
  g.comm_radius = f.radius;
  g.anchors = corner_anchors(f.dim, f.side);
  g.huber_radius = f.huber_radius;
  return g;
}

json generator_to_json(const NetworkFlags& f, std::uint64_t seed) {
  return {{"nodes", f.nodes},     {"dim", f.dim},
          {"radius", f.radius},   {"side", f.side},
          {"anchors", f.anchors}, {"huber_radius", f.huber_radius},
          {"seed", seed}};
}

json noise_to_json(const NoiseFlags& f) {
  return {{"model", f.model},
          {"sigma", f.sigma},
          {"faulty", f.faulty},
          {"sigma_outlier", f.sigma_outlier},
          {"bias_factor", f.bias_factor}};
}

NetworkScenario load_or_generate(const NetworkFlags& f, std::uint64_t seed) {
  if (!f.scenario.empty()) return read_scenario(f.scenario);
  return generate_geometric_network(make_generator(f), derive_seed(seed, 0, SeedStream::topology));
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_output(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  NetworkFlags net;
  NoiseFlags noise;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateFlags& f, std::ostream& out) {
  NetworkScenario s =
      generate_geometric_network(make_generator(f.net), derive_seed(f.seed, 0, SeedStream::topology));
  s = apply_noise(s, make_noise(f.noise), derive_seed(f.seed, 0, SeedStream::noise));
  const json meta = {{"command", "generate"},
                     {"generator", generator_to_json(f.net, f.seed)},
                     {"noise", noise_to_json(f.noise)}};
  ensure_parent(f.out);
  write_scenario(f.out, s, meta);
  const auto inc = build_incidence(s);
  out << "sensors " << s.sensor_count() << "\nanchors " << s.anchor_count() << "\nedges "
      << s.edges.size() << "\nanchor_links " << s.links.size() << "\nmax_degree "
      << inc.max_degree << "\nlipschitz " << lipschitz_constant(inc) << "\nwritten " << f.out
      << '\n';
  return 0;
}

// ------------------------------------------------------------------- solve

struct SolveFlags {
  std::string scenario;
  std::string algorithm = "sync";
  std::optional<std::int64_t> max_iters;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::optional<double> huber_radius;
  std::string match_load;
  int inner_max_iters = 200;
  std::string out = "estimates.json";
  std::string trace = "trace.csv";
};

int cmd_solve(const SolveFlags& f, std::ostream& out) {
  NetworkScenario s = read_scenario(f.scenario);
  if (f.huber_radius) set_huber_radius(s, *f.huber_radius);
  if (!f.match_load.empty() && f.algorithm != "async") {
    throw std::invalid_argument("--match-load applies to the async algorithm only");
  }
  const Positions init = random_init(s, derive_seed(f.seed, 0, SeedStream::init));

  SolveResult result;
  json echo = {{"command", "solve"},
               {"scenario", f.scenario},
               {"algorithm", f.algorithm},
               {"tol", f.tol},
               {"seed", f.seed}};
  if (f.huber_radius) echo["huber_radius"] = *f.huber_radius;
  if (f.algorithm == "sync") {
    SyncOptions opts;
    if (f.max_iters) opts.max_iters = *f.max_iters;
    opts.tol = f.tol;
    echo["max_iters"] = opts.max_iters;
    result = run_sync(s, init, opts);
  } else {
    AsyncOptions opts;
    if (f.max_iters) opts.max_steps = *f.max_iters;
    opts.tol = f.tol;
    opts.inner_max_iters = f.inner_max_iters;
    if (!f.match_load.empty()) {
      opts.message_budget = read_trace_message_total(f.match_load);
      opts.stop_on_convergence = false;
      echo["match_load"] = f.match_load;
      echo["message_budget"] = *opts.message_budget;
    }
    echo["max_iters"] = opts.max_steps;
    echo["inner_max_iters"] = opts.inner_max_iters;
    ActivationSequence activation(s.sensor_count(), derive_seed(f.seed, 0, SeedStream::activation));
    result = run_async(s, init, activation, opts);
  }

  ensure_parent(f.trace);
  write_trace_csv(fs::path(f.trace), result.trace, f.algorithm == "async");
  const json doc = {{"config", echo},
                    {"estimates", positions_to_json(result.positions)},
                    {"iterations", result.iterations},
                    {"messages", result.messages},
                    {"converged", result.converged},
                    {"final_cost", result.trace.back().cost}};
  write_json(f.out, doc);
  out << "algorithm " << f.algorithm << "\niterations " << result.iterations << "\nmessages "
      << result.messages << "\nfinal_cost " << std::setprecision(12) << result.trace.back().cost
      << "\nconverged " << (result.converged ? "yes" : "no") << '\n';
  return 0;
}

// ------------------------------------------------------------------ bounds

struct BoundsFlags {
  std::string loss = "all";
  std::string scenario;
  GapStudyConfig study;
  std::string out = "bounds.csv";
  std::string trials_out;
};

std::vector<LossFamily> selected_losses(const std::string& name, double huber_radius) {
  if (name == "all") return {LossFamily::quadratic(), LossFamily::absolute(), LossFamily::huber(huber_radius)};
  const auto kind = loss_kind_from_string(name);
  if (kind == LossFamily::Kind::huber) return {LossFamily::huber(huber_radius)};
  return {LossFamily{kind, std::nullopt}};
}

std::vector<GapCertificate> certify_scenario(const BoundsFlags& f) {
  NetworkScenario s = read_scenario(f.scenario);
  set_huber_radius(s, f.study.huber_radius);
  std::vector<GapCertificate> certs;
  const bool line = s.dim == 1 && s.sensor_count() == 1;
  for (const auto& loss : selected_losses(f.loss, f.study.huber_radius)) {
    Positions x_star;
    if (line) {
      x_star = Positions::Constant(1, 1, grid_minimize_1d(s, loss, f.study.resolution).x_f);
    } else if (loss.kind == LossFamily::Kind::absolute) {
      throw std::invalid_argument("the absolute loss is only supported for one sensor on a line");
    } else {
      const Surrogate sur =
          loss.kind == LossFamily::Kind::huber ? Surrogate::huber : Surrogate::quadratic;
      const NetworkScenario solved = with_surrogate(s, sur, f.study.huber_radius);
      SyncOptions opts;
      opts.max_iters = 100000;
      opts.tol = 1e-12;
      x_star = run_sync(solved, random_init(s, derive_seed(f.study.seed, 0, SeedStream::init)), opts)
                   .positions;
    }
    certs.push_back(tight_gap_bound(x_star, s, loss));
  }
  return certs;
}

int cmd_bounds(const BoundsFlags& f, std::ostream& out) {
  if (!f.scenario.empty()) {
    const auto certs = certify_scenario(f);
    auto file = open_output(f.out);
    write_certificates_csv(file, certs);
    write_certificates_csv(out, certs);
    return 0;
  }
  const GapStudy study = run_gap_study(f.study);
  std::vector<GapSummaryRow> rows;
  for (const auto& row : study.summary) {
    if (f.loss == "all" || to_string(row.loss) == f.loss) rows.push_back(row);
  }
  auto file = open_output(f.out);
  write_gap_summary_csv(file, rows);
  write_gap_summary_csv(out, rows);
  if (!f.trials_out.empty()) {
    auto trials = open_output(f.trials_out);
    trials << "trial,loss,true_gap,tight_bound,apriori_bound\n";
    trials << std::setprecision(17);
    for (std::size_t k = 0; k < study.trials.size(); ++k) {
      const auto& t = study.trials[k];
      if (f.loss != "all" && to_string(t.loss) != f.loss) continue;
      trials << k / 3 << ',' << to_string(t.loss) << ',' << t.true_gap << ',' << t.tight_bound
             << ',' << t.apriori_bound << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------ montecarlo, compare

struct ExperimentFlags {
  NetworkFlags net;
  NoiseFlags noise;
  std::string surrogate = "huber";
  std::string algorithm = "sync";
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<int> exclude;
  int jobs = 1;
  std::int64_t max_iters = 5000;
  std::int64_t max_steps = 200000;
  double tol = 1e-9;
  std::string out_dir = "results";
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--scenario", f.net.scenario, "Scenario file; generated when omitted");
  add_generator_flags(cmd, f.net);
  add_noise_flags(cmd, f.noise);
  cmd->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd->add_option("--exclude", f.exclude, "Sensors left out of the error metric");
  cmd->add_option("--jobs", f.jobs, "Concurrent trials")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Synchronous round limit")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-steps", f.max_steps, "Asynchronous activation limit")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tol", f.tol, "Stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
}

ExperimentConfig make_experiment(const ExperimentFlags& f) {
  ExperimentConfig cfg;
  cfg.scenario = load_or_generate(f.net, f.seed);
  cfg.noise = make_noise(f.noise);
  cfg.surrogate = surrogate_from_string(f.surrogate);
  cfg.huber_radius = f.net.huber_radius;
  cfg.algorithm = algorithm_from_string(f.algorithm);
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.excluded = f.exclude;
  cfg.jobs = f.jobs;
  cfg.sync.max_iters = f.max_iters;
  cfg.sync.tol = f.tol;
  cfg.async.max_steps = f.max_steps;
  cfg.async.tol = f.tol;
  return cfg;
}

json experiment_echo(const ExperimentFlags& f, const ExperimentConfig& cfg) {
  json echo = config_to_json(cfg);
  if (f.net.scenario.empty()) {
    echo["generator"] = generator_to_json(f.net, f.seed);
  } else {
    echo["scenario"] = f.net.scenario;
  }
  return echo;
}

int cmd_montecarlo(const ExperimentFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = make_experiment(f);
  const ExperimentResult result = run_montecarlo(cfg);
  const fs::path dir(f.out_dir);
  {
    auto file = open_output(dir / "trials.csv");
    write_trials_csv(file, result.trials);
  }
  {
    auto file = open_output(dir / "cdf.csv");
    write_cdf_csv(file, result.summary.cdf);
  }
  write_json(dir / "summary.json",
             {{"command", "montecarlo"}, {"config", experiment_echo(f, cfg)},
              {"summary", summary_to_json(result.summary)}});
  out << "mean_error_m " << std::setprecision(10) << result.summary.mean_error << "\nstd_error_m "
      << result.summary.std_error << "\nconverged " << result.summary.converged << '/'
      << result.summary.trials << "\nwritten " << dir.string() << '\n';
  return 0;
}

int cmd_compare(const ExperimentFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = make_experiment(f);
  const ComparisonResult result = equal_load_compare(cfg);
  const fs::path dir(f.out_dir);
  {
    auto file = open_output(dir / "sync_trials.csv");
    write_trials_csv(file, result.sync.trials);
  }
  {
    auto file = open_output(dir / "async_trials.csv");
    write_trials_csv(file, result.async.trials);
  }
  {
    auto file = open_output(dir / "cdf.csv");
    write_paired_cdf_csv(file, result);
  }
  json echo = experiment_echo(f, cfg);
  echo.erase("algorithm");
  write_json(dir / "summary.json", {{"command", "compare"},
                                    {"config", echo},
                                    {"budgets", result.budgets},
                                    {"sync", summary_to_json(result.sync.summary)},
                                    {"async", summary_to_json(result.async.summary)}});
  out << "sync_mean_error_m " << std::setprecision(10) << result.sync.summary.mean_error
      << "\nasync_mean_error_m " << result.async.summary.mean_error << "\nwritten "
      << dir.string() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust network localization with Huber range discrepancies"};
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a random geometric scenario");
  add_generator_flags(generate, gen.net);
  gen.noise.sigma = 0.0;
  add_noise_flags(generate, gen.noise);
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Scenario file")->required();

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Run the sync or async solver on a scenario");
  solve->add_option("--scenario", solve_flags.scenario, "Scenario file")->required();
  solve->add_option("--algorithm", solve_flags.algorithm, "sync or async")
      ->check(CLI::IsMember({"sync", "async"}))
      ->capture_default_str();
  solve->add_option("--max-iters", solve_flags.max_iters, "Round or activation limit")
      ->check(CLI::PositiveNumber);
  solve->add_option("--tol", solve_flags.tol, "Stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--seed", solve_flags.seed, "Initialization and activation seed")->capture_default_str();
  solve->add_option("--radius-huber", solve_flags.huber_radius, "Override every Huber radius")
      ->check(CLI::PositiveNumber);
  solve->add_option("--match-load", solve_flags.match_load,
                    "Trace CSV whose final message count bounds the async run")
      ->check(CLI::ExistingFile);
  solve->add_option("--inner-max-iters", solve_flags.inner_max_iters, "Async inner iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--out", solve_flags.out, "Estimates JSON")->capture_default_str();
  solve->add_option("--trace", solve_flags.trace, "Trace CSV")->capture_default_str();

  BoundsFlags bounds_flags;
  auto* bounds = app.add_subcommand("bounds", "Optimality-gap bounds");
  bounds->add_option("--loss", bounds_flags.loss, "Loss family")
      ->check(CLI::IsMember({"all", "huber", "quadratic", "absolute"}))
      ->capture_default_str();
  bounds->add_option("--scenario", bounds_flags.scenario,
                     "Certify this scenario instead of running the line study");
  bounds->add_option("--trials", bounds_flags.study.trials, "Line study trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bounds->add_option("--seed", bounds_flags.study.seed, "Seed")->capture_default_str();
  bounds->add_option("--resolution", bounds_flags.study.resolution, "Grid resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bounds->add_option("--huber-radius", bounds_flags.study.huber_radius, "Huber radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bounds->add_option("--sigma", bounds_flags.study.sigma, "Regular noise")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bounds->add_option("--sigma-outlier", bounds_flags.study.sigma_outlier, "Outlier noise")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bounds->add_option("--out", bounds_flags.out, "Summary or certificate CSV")->capture_default_str();
  bounds->add_option("--trials-out", bounds_flags.trials_out, "Per-trial CSV of the line study");

  ExperimentFlags mc_flags;
  auto* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo localization experiment");
  add_experiment_flags(montecarlo, mc_flags);
  montecarlo->add_option("--surrogate", mc_flags.surrogate, "Loss minimised by the solver")
      ->check(CLI::IsMember({"huber", "quadratic", "absolute"}))
      ->capture_default_str();
  montecarlo->add_option("--algorithm", mc_flags.algorithm, "sync or async")
      ->check(CLI::IsMember({"sync", "async"}))
      ->capture_default_str();

  ExperimentFlags cmp_flags;
  auto* compare = app.add_subcommand("compare", "Sync and async at equal communication load");
  add_experiment_flags(compare, cmp_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (solve->parsed()) return cmd_solve(solve_flags, out);
    if (bounds->parsed()) return cmd_bounds(bounds_flags, out);
    if (montecarlo->parsed()) return cmd_montecarlo(mc_flags, out);
    if (compare->parsed()) return cmd_compare(cmp_flags, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rhloc::cli
