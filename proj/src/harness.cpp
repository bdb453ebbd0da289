#include "rhloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rhloc/random.hpp"

namespace rhloc {

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::sync ? "sync" : "async";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "sync") return Algorithm::sync;
  if (name == "async") return Algorithm::async;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Surrogate surrogate) {
  switch (surrogate) {
    case Surrogate::huber:
      return "huber";
    case Surrogate::quadratic:
      return "quadratic";
    case Surrogate::absolute:
      return "absolute";
  }
  return "unknown";
}

Surrogate surrogate_from_string(std::string_view name) {
  if (name == "huber") return Surrogate::huber;
  if (name == "quadratic") return Surrogate::quadratic;
  if (name == "absolute") return Surrogate::absolute;
  throw std::invalid_argument("unknown surrogate '" + std::string(name) + "'");
}

NetworkScenario with_surrogate(const NetworkScenario& scenario, Surrogate surrogate,
                               double huber_radius) {
  NetworkScenario out = scenario;
  switch (surrogate) {
    case Surrogate::huber:
      if (!(huber_radius > 0.0)) throw std::invalid_argument("Huber radius must be positive");
      set_huber_radius(out, huber_radius);
      break;
    case Surrogate::quadratic:
      set_huber_radius(out, kQuadraticRadius);
      break;
    case Surrogate::absolute:
      set_huber_radius(out, kAbsoluteRadius);
      break;
  }
  return out;
}

double error_per_sensor(const Positions& estimates, const Positions& truth,
                        const std::vector<int>& excluded) {
  if (estimates.rows() != truth.rows() || estimates.cols() != truth.cols()) {
    throw std::invalid_argument("estimates and truth have different shapes");
  }
  double sq = 0.0;
  int kept = 0;
  for (Eigen::Index i = 0; i < truth.cols(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), static_cast<int>(i)) != excluded.end()) continue;
    sq += (estimates.col(i) - truth.col(i)).squaredNorm();
    ++kept;
  }
  if (kept == 0) throw std::invalid_argument("every node is excluded from the error metric");
  return std::sqrt(sq) / kept;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<std::pair<double, double>> cdf;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k + 1 < values.size() && values[k + 1] == values[k]) continue;
    cdf.emplace_back(values[k], static_cast<double>(k + 1) / n);
  }
  return cdf;
}

NetworkScenario trial_scenario(const ExperimentConfig& config, int trial) {
  const auto seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial), SeedStream::noise);
  NetworkScenario noisy = apply_noise(config.scenario, config.noise, seed);
  return with_surrogate(noisy, config.surrogate, config.huber_radius);
}

Positions trial_init(const ExperimentConfig& config, int trial) {
  return random_init(config.scenario,
                     derive_seed(config.seed, static_cast<std::uint64_t>(trial), SeedStream::init));
}

ExperimentSummary summarize(const std::vector<TrialResult>& trials) {
  ExperimentSummary s;
  s.trials = static_cast<int>(trials.size());
  if (trials.empty()) return s;
  std::vector<double> errors;
  for (const auto& t : trials) {
    errors.push_back(t.error);
    s.converged += t.converged ? 1 : 0;
  }
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean_error = sum / static_cast<double>(errors.size());
  if (errors.size() > 1) {
    double var = 0.0;
    for (double e : errors) var += (e - s.mean_error) * (e - s.mean_error);
    s.std_error = std::sqrt(var / static_cast<double>(errors.size() - 1));
  }
  s.cdf = empirical_cdf(errors);
  return s;
}

namespace {

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  if (config.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (!(config.meters_per_unit > 0.0)) throw std::invalid_argument("meters per unit must be positive");
  validate(config.scenario);
  for (int node : config.excluded) {
    if (node < 0 || node >= config.scenario.sensor_count()) {
      throw std::invalid_argument("excluded node " + std::to_string(node) + " is not a sensor");
    }
  }
}

// Runs body(m) for m in [0, trials) on `jobs` threads. The first exception
// is rethrown after all workers stop.
template <typename Body>
void for_each_trial(int trials, int jobs, Body body) {
  if (jobs <= 1) {
    for (int m = 0; m < trials; ++m) body(m);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < std::min(jobs, trials); ++w) {
    workers.emplace_back([&] {
      for (int m = next++; m < trials; m = next++) {
        try {
          body(m);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

TrialResult to_trial(const ExperimentConfig& config, int m, const SolveResult& solve,
                     Algorithm algorithm) {
  TrialResult r;
  r.trial = m;
  r.estimates = solve.positions;
  r.error = config.meters_per_unit *
            error_per_sensor(solve.positions, config.scenario.truth, config.excluded);
  r.iterations = solve.iterations;
  r.messages = solve.messages;
  r.converged = solve.converged;
  r.algorithm = algorithm;
  return r;
}

SolveResult solve_async(const ExperimentConfig& config, int m, const NetworkScenario& scenario,
                        const Positions& init, const AsyncOptions& options) {
  ActivationSequence activation(
      scenario.sensor_count(),
      derive_seed(config.seed, static_cast<std::uint64_t>(m), SeedStream::activation));
  return run_async(scenario, init, activation, options);
}

}  // namespace

ExperimentResult run_montecarlo(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentResult result;
  result.trials.resize(config.trials);
  for_each_trial(config.trials, config.jobs, [&](int m) {
    const NetworkScenario scenario = trial_scenario(config, m);
    const Positions init = trial_init(config, m);
    const SolveResult solve = config.algorithm == Algorithm::sync
                                  ? run_sync(scenario, init, config.sync)
                                  : solve_async(config, m, scenario, init, config.async);
    result.trials[m] = to_trial(config, m, solve, config.algorithm);
  });
  result.summary = summarize(result.trials);
  return result;
}

ComparisonResult equal_load_compare(const ExperimentConfig& config) {
  validate_config(config);
  ComparisonResult out;
  out.sync.trials.resize(config.trials);
  out.async.trials.resize(config.trials);
  out.budgets.resize(config.trials);
  for_each_trial(config.trials, config.jobs, [&](int m) {
    const NetworkScenario scenario = trial_scenario(config, m);
    const Positions init = trial_init(config, m);
    const SolveResult sync = run_sync(scenario, init, config.sync);
    AsyncOptions options = config.async;
    options.message_budget = sync.messages;
    options.stop_on_convergence = false;
    const SolveResult async = solve_async(config, m, scenario, init, options);
    out.sync.trials[m] = to_trial(config, m, sync, Algorithm::sync);
    out.async.trials[m] = to_trial(config, m, async, Algorithm::async);
    out.budgets[m] = sync.messages;
  });
  out.sync.summary = summarize(out.sync.trials);
  out.async.summary = summarize(out.async.trials);
  return out;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "trial,error,iters,messages,converged\n";
  char buf[64];
  for (const auto& t : trials) {
    std::snprintf(buf, sizeof buf, "%.17g", t.error);
    out << t.trial << ',' << buf << ',' << t.iterations << ',' << t.messages << ','
        << (t.converged ? 1 : 0) << '\n';
  }
}

void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf) {
  out << "value,fraction\n";
  char buf[96];
  for (const auto& [value, fraction] : cdf) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", value, fraction);
    out << buf << '\n';
  }
}

void write_paired_cdf_csv(std::ostream& out, const ComparisonResult& comparison) {
  out << "value,fraction,algorithm\n";
  char buf[96];
  for (const auto* run : {&comparison.sync, &comparison.async}) {
    const auto tag = run == &comparison.sync ? "sync" : "async";
    for (const auto& [value, fraction] : run->summary.cdf) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", value, fraction);
      out << buf << ',' << tag << '\n';
    }
  }
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json noise = std::visit(
      [](const auto& m) -> nlohmann::json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianNoise>) {
          return {{"model", "gaussian"}, {"sigma", m.sigma}};
        } else if constexpr (std::is_same_v<M, OutlierNoise>) {
          return {{"model", "outlier"},
                  {"sigma", m.sigma},
                  {"faulty", m.faulty},
                  {"sigma_outlier", m.sigma_outlier}};
        } else {
          return {{"model", "bias"},
                  {"sigma", m.sigma},
                  {"faulty", m.faulty},
                  {"bias_factor", m.bias_factor}};
        }
      },
      config.noise);
  nlohmann::json async = {{"max_steps", config.async.max_steps},
                          {"tol", config.async.tol},
                          {"inner_tol", config.async.inner_tol},
                          {"inner_max_iters", config.async.inner_max_iters}};
  if (config.async.message_budget) async["message_budget"] = *config.async.message_budget;
  return {{"sensors", config.scenario.sensor_count()},
          {"anchors", config.scenario.anchor_count()},
          {"dimension", config.scenario.dim},
          {"edges", config.scenario.edges.size()},
          {"noise", noise},
          {"surrogate", to_string(config.surrogate)},
          {"huber_radius", config.huber_radius},
          {"algorithm", to_string(config.algorithm)},
          {"trials", config.trials},
          {"seed", config.seed},
          {"excluded", config.excluded},
          {"sync", {{"max_iters", config.sync.max_iters},
                    {"tol", config.sync.tol},
                    {"window", config.sync.window}}},
          {"async", async},
          {"jobs", config.jobs},
          {"meters_per_unit", config.meters_per_unit}};
}

nlohmann::json summary_to_json(const ExperimentSummary& summary) {
  return {{"mean_error_m", summary.mean_error},
          {"std_error_m", summary.std_error},
          {"trials", summary.trials},
          {"converged", summary.converged}};
}

}  // namespace rhloc
