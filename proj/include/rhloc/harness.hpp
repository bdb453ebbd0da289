#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rhloc/async_solver.hpp"
#include "rhloc/netmodel.hpp"
#include "rhloc/sync_solver.hpp"

namespace rhloc {

enum class Algorithm { sync, async };

/// Loss minimised by the distributed solver. Quadratic and absolute are
/// reached through the Huber machinery: a huge radius gives the quadratic
/// cost exactly, a tiny one smooths the absolute value.
enum class Surrogate { huber, quadratic, absolute };

inline constexpr double kQuadraticRadius = 1e9;
inline constexpr double kAbsoluteRadius = 1e-3;

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);
std::string_view to_string(Surrogate surrogate);
Surrogate surrogate_from_string(std::string_view name);

/// Copy of the scenario with every radius set for the surrogate.
NetworkScenario with_surrogate(const NetworkScenario& scenario, Surrogate surrogate,
                               double huber_radius);

struct TrialResult {
  int trial = 0;
  Positions estimates;
  double error = 0.0;  // per-sensor error, in meters
  std::int64_t iterations = 0;
  std::int64_t messages = 0;
  bool converged = false;
  Algorithm algorithm = Algorithm::sync;
};

struct ExperimentConfig {
  /// Topology and true positions; ranges are resampled every trial.
  NetworkScenario scenario;
  NoiseModel noise = GaussianNoise{0.04};
  Surrogate surrogate = Surrogate::huber;
  double huber_radius = 0.1;
  Algorithm algorithm = Algorithm::sync;
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<int> excluded;  // nodes left out of the error metric
  SyncOptions sync;
  AsyncOptions async;
  int jobs = 1;
  double meters_per_unit = 1000.0;
};

/// ||x_hat - x_true|| over the retained nodes, divided by their count.
/// Throws std::invalid_argument on shape mismatch or when nothing is retained.
double error_per_sensor(const Positions& estimates, const Positions& truth,
                        const std::vector<int>& excluded = {});

/// Right-continuous empirical CDF: one (value, fraction <= value) pair per
/// distinct value. Throws std::invalid_argument on empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

struct ExperimentSummary {
  double mean_error = 0.0;
  double std_error = 0.0;
  int converged = 0;
  int trials = 0;
  std::vector<std::pair<double, double>> cdf;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;  // ordered by trial index
  ExperimentSummary summary;
};

/// Noisy scenario and initial point of trial m, from the master seed.
NetworkScenario trial_scenario(const ExperimentConfig& config, int trial);
Positions trial_init(const ExperimentConfig& config, int trial);

ExperimentSummary summarize(const std::vector<TrialResult>& trials);

/// Solves every trial, optionally on `jobs` threads. Output does not depend
/// on `jobs`. Non-convergence is recorded per trial.
ExperimentResult run_montecarlo(const ExperimentConfig& config);

struct ComparisonResult {
  ExperimentResult sync;
  ExperimentResult async;
  std::vector<std::int64_t> budgets;  // sync message total per trial
};

/// Per trial: run sync to convergence, then async on the same noisy
/// scenario and initial point, stopped at the sync message total.
ComparisonResult equal_load_compare(const ExperimentConfig& config);

/// CSV: trial,error,iters,messages,converged
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
/// CSV: value,fraction
void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf);
/// CSV: value,fraction,algorithm
void write_paired_cdf_csv(std::ostream& out, const ComparisonResult& comparison);

nlohmann::json config_to_json(const ExperimentConfig& config);
nlohmann::json summary_to_json(const ExperimentSummary& summary);

}  // namespace rhloc
