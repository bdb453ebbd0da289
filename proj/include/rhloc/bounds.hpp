#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "rhloc/cost.hpp"

namespace rhloc {

/// Optimality-gap certificate for a minimiser x* of the convex surrogate f.
///
/// g* - f* <= g(x*) - f(x*) = tight_bound, where the sum runs over the
/// measurements whose discrepancy is negative at x*. apriori_bound needs no
/// solve at all.
struct GapCertificate {
  LossFamily loss;
  double f_star = 0.0;
  double g_at_xstar = 0.0;
  double tight_bound = 0.0;
  double apriori_bound = 0.0;
  std::vector<int> violating_edges;  // E_2
  std::vector<int> violating_links;  // anchor analogue of E_2
};

GapCertificate tight_gap_bound(const Positions& x_star, const NetworkScenario& scenario,
                               LossFamily loss);

/// sum over all measurements of 1/2 loss(range).
double apriori_gap_bound(const NetworkScenario& scenario, LossFamily loss);

/// CSV: loss,f_star,g_at_xstar,tight_bound,apriori_bound
void write_certificates_csv(std::ostream& out, const std::vector<GapCertificate>& certificates);

struct GridResult {
  double x_f = 0.0;  // argmin of f on the grid
  double f_min = 0.0;
  double x_g = 0.0;  // argmin of g on the grid
  double g_min = 0.0;
};

/// Default search interval: [min anchor - 2 max range, max anchor + 2 max range].
std::pair<double, double> default_grid_interval(const NetworkScenario& scenario);

/// Exhaustive grid search of f and g for a single sensor on a line. Throws
/// std::invalid_argument unless p = 1 with one sensor, or when the interval
/// does not cover every anchor +/- the largest range.
GridResult grid_minimize_1d(const NetworkScenario& scenario, LossFamily loss,
                            double resolution = 1e-4,
                            std::optional<std::pair<double, double>> interval = std::nullopt);

/// One sensor on a line measured by anchors at the given coordinates.
NetworkScenario single_sensor_line(double sensor, const std::vector<double>& anchors,
                                   double huber_radius);

struct GapStudyConfig {
  int trials = 500;
  double sensor = 3.0;
  std::vector<double> anchors{0.0, 2.0, 6.0};
  double sigma = 0.04;
  double sigma_outlier = 4.0;
  double huber_radius = 0.1;
  double resolution = 1e-4;
  std::uint64_t seed = 1;
};

struct GapTrial {
  LossFamily::Kind loss = LossFamily::Kind::huber;
  double true_gap = 0.0;  // g* - f* from the grid
  double tight_bound = 0.0;
  double apriori_bound = 0.0;
};

struct GapSummaryRow {
  LossFamily::Kind loss = LossFamily::Kind::huber;
  double mean_true_gap = 0.0;
  double mean_tight_bound = 0.0;
  double mean_apriori_bound = 0.0;
  double tight_below_apriori = 0.0;  // fraction of trials with tight < a priori
};

struct GapStudy {
  std::vector<GapTrial> trials;       // trial-major, three losses per trial
  std::vector<GapSummaryRow> summary;  // quadratic, absolute, huber
};

/// Monte Carlo over the 1D three-anchor scenario: regular noise on every
/// range plus an outlier draw on one range chosen uniformly per trial.
GapStudy run_gap_study(const GapStudyConfig& config);

/// CSV: loss,mean_true_gap,mean_tight_bound,mean_apriori_bound,tight_below_apriori
void write_gap_summary_csv(std::ostream& out, const std::vector<GapSummaryRow>& rows);

}  // namespace rhloc
