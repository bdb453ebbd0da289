#include "rhloc/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "rhloc/random.hpp"

namespace rhloc {

GapCertificate tight_gap_bound(const Positions& x_star, const NetworkScenario& s, LossFamily loss) {
  GapCertificate cert;
  cert.loss = loss;
  cert.f_star = convex_cost_f(x_star, s, loss);
  cert.g_at_xstar = nonconvex_cost_g(x_star, s, loss);
  for (int e = 0; e < static_cast<int>(s.edges.size()); ++e) {
    const auto& edge = s.edges[e];
    const double t = (x_star.col(edge.i) - x_star.col(edge.j)).norm() - edge.range;
    if (t < 0.0) {
      cert.violating_edges.push_back(e);
      cert.tight_bound += 0.5 * loss(t, edge.radius);
    }
  }
  for (int l = 0; l < static_cast<int>(s.links.size()); ++l) {
    const auto& link = s.links[l];
    const double t = (x_star.col(link.node) - s.anchors.col(link.anchor)).norm() - link.range;
    if (t < 0.0) {
      cert.violating_links.push_back(l);
      cert.tight_bound += 0.5 * loss(t, link.radius);
    }
  }
  cert.apriori_bound = apriori_gap_bound(s, loss);
  return cert;
}

double apriori_gap_bound(const NetworkScenario& s, LossFamily loss) {
  double total = 0.0;
  for (const auto& e : s.edges) total += 0.5 * loss(e.range, e.radius);
  for (const auto& l : s.links) total += 0.5 * loss(l.range, l.radius);
  return total;
}

void write_certificates_csv(std::ostream& out, const std::vector<GapCertificate>& certificates) {
  out << "loss,f_star,g_at_xstar,tight_bound,apriori_bound\n";
  char buf[160];
  for (const auto& c : certificates) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", c.f_star, c.g_at_xstar,
                  c.tight_bound, c.apriori_bound);
    out << to_string(c.loss.kind) << ',' << buf << '\n';
  }
}

std::pair<double, double> default_grid_interval(const NetworkScenario& s) {
  if (s.anchor_count() == 0) throw std::invalid_argument("grid search needs anchors");
  double max_range = 0.0;
  for (const auto& l : s.links) max_range = std::max(max_range, l.range);
  const double lo = s.anchors.row(0).minCoeff();
  const double hi = s.anchors.row(0).maxCoeff();
  return {lo - 2.0 * max_range, hi + 2.0 * max_range};
}

namespace {

void require_line_scenario(const NetworkScenario& s) {
  if (s.dim != 1 || s.sensor_count() != 1) {
    throw std::invalid_argument("grid search needs a single sensor in one dimension");
  }
}

template <std::size_t N>
std::array<GridResult, N> grid_scan(const NetworkScenario& s, const std::array<LossFamily, N>& losses,
                                    double resolution, std::pair<double, double> interval) {
  require_line_scenario(s);
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  double max_range = 0.0;
  for (const auto& l : s.links) max_range = std::max(max_range, l.range);
  const double need_lo = s.anchors.row(0).minCoeff() - max_range;
  const double need_hi = s.anchors.row(0).maxCoeff() + max_range;
  if (interval.first > need_lo || interval.second < need_hi) {
    throw std::invalid_argument("interval must contain all anchors +/- the largest range");
  }

  std::vector<double> anchor_pos;
  std::vector<double> ranges;
  std::vector<double> radii;
  for (const auto& l : s.links) {
    anchor_pos.push_back(s.anchors(0, l.anchor));
    ranges.push_back(l.range);
    radii.push_back(l.radius);
  }

  std::array<GridResult, N> best;
  for (auto& b : best) {
    b.f_min = std::numeric_limits<double>::infinity();
    b.g_min = std::numeric_limits<double>::infinity();
  }
  const auto steps = static_cast<long>(std::floor((interval.second - interval.first) / resolution));
  for (long k = 0; k <= steps; ++k) {
    const double x = interval.first + static_cast<double>(k) * resolution;
    std::array<double, N> f{};
    std::array<double, N> g{};
    for (std::size_t a = 0; a < anchor_pos.size(); ++a) {
      const double t = std::abs(x - anchor_pos[a]) - ranges[a];
      const double clipped = hinge(t);
      for (std::size_t m = 0; m < N; ++m) {
        g[m] += 0.5 * losses[m](t, radii[a]);
        f[m] += 0.5 * losses[m](clipped, radii[a]);
      }
    }
    for (std::size_t m = 0; m < N; ++m) {
      if (f[m] < best[m].f_min) {
        best[m].f_min = f[m];
        best[m].x_f = x;
      }
      if (g[m] < best[m].g_min) {
        best[m].g_min = g[m];
        best[m].x_g = x;
      }
    }
  }
  return best;
}

}  // namespace

GridResult grid_minimize_1d(const NetworkScenario& s, LossFamily loss, double resolution,
                            std::optional<std::pair<double, double>> interval) {
  require_line_scenario(s);
  const auto span = interval ? *interval : default_grid_interval(s);
  return grid_scan<1>(s, {loss}, resolution, span)[0];
}

NetworkScenario single_sensor_line(double sensor, const std::vector<double>& anchors,
                                   double huber_radius) {
  NetworkScenario s;
  s.dim = 1;
  s.truth = Positions::Constant(1, 1, sensor);
  s.anchors.resize(1, static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    s.anchors(0, static_cast<Eigen::Index>(k)) = anchors[k];
    s.links.push_back({0, static_cast<int>(k), std::abs(sensor - anchors[k]), huber_radius});
  }
  return s;
}

GapStudy run_gap_study(const GapStudyConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
  if (cfg.anchors.empty()) throw std::invalid_argument("need at least one anchor");
  const std::array<LossFamily, 3> losses{LossFamily::quadratic(), LossFamily::absolute(),
                                         LossFamily::huber()};
  const NetworkScenario base = single_sensor_line(cfg.sensor, cfg.anchors, cfg.huber_radius);

  GapStudy study;
  for (int m = 0; m < cfg.trials; ++m) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(m), SeedStream::noise));
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(base.links.size()) - 1);

    NetworkScenario s = base;
    std::vector<double> nu(s.links.size());
    for (auto& v : nu) v = cfg.sigma * unit(rng);
    nu[pick(rng)] += cfg.sigma_outlier * unit(rng);
    for (std::size_t k = 0; k < s.links.size(); ++k) {
      s.links[k].range = std::abs(std::abs(cfg.sensor - cfg.anchors[k]) + nu[k]);
    }

    const auto grid = grid_scan<3>(s, losses, cfg.resolution, default_grid_interval(s));
    for (std::size_t l = 0; l < losses.size(); ++l) {
      const Positions x_star = Positions::Constant(1, 1, grid[l].x_f);
      const auto cert = tight_gap_bound(x_star, s, losses[l]);
      study.trials.push_back(
          {losses[l].kind, grid[l].g_min - grid[l].f_min, cert.tight_bound, cert.apriori_bound});
    }
  }

  for (const auto& loss : losses) {
    GapSummaryRow row;
    row.loss = loss.kind;
    int count = 0;
    for (const auto& t : study.trials) {
      if (t.loss != loss.kind) continue;
      row.mean_true_gap += t.true_gap;
      row.mean_tight_bound += t.tight_bound;
      row.mean_apriori_bound += t.apriori_bound;
      row.tight_below_apriori += t.tight_bound < t.apriori_bound ? 1.0 : 0.0;
      ++count;
    }
    row.mean_true_gap /= count;
    row.mean_tight_bound /= count;
    row.mean_apriori_bound /= count;
    row.tight_below_apriori /= count;
    study.summary.push_back(row);
  }
  return study;
}

void write_gap_summary_csv(std::ostream& out, const std::vector<GapSummaryRow>& rows) {
  out << "loss,mean_true_gap,mean_tight_bound,mean_apriori_bound,tight_below_apriori\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", r.mean_true_gap, r.mean_tight_bound,
                  r.mean_apriori_bound, r.tight_below_apriori);
    out << to_string(r.loss) << ',' << buf << '\n';
  }
}

}  // namespace rhloc
