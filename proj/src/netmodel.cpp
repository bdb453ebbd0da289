#include "rhloc/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace rhloc {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string edge_name(const Edge& e) {
  return "(" + std::to_string(e.i) + "," + std::to_string(e.j) + ")";
}

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

void normalize(NetworkScenario& scenario) {
  for (auto& e : scenario.edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(scenario.edges.begin(), scenario.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  std::sort(scenario.links.begin(), scenario.links.end(),
            [](const AnchorLink& a, const AnchorLink& b) {
              return std::pair(a.node, a.anchor) < std::pair(b.node, b.anchor);
            });
}

bool is_connected(int sensor_count, const std::vector<Edge>& edges) {
  if (sensor_count <= 0) return false;
  std::vector<std::vector<int>> adj(sensor_count);
  for (const auto& e : edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(sensor_count, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        q.push(v);
      }
    }
  }
  return visited == sensor_count;
}

void validate(const NetworkScenario& s) {
  if (s.dim < 1 || s.dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  const int n = s.sensor_count();
  const int m = s.anchor_count();
  if (n < 1) throw std::invalid_argument("scenario has no sensors");
  if (s.truth.rows() != s.dim) throw std::invalid_argument("true positions have wrong dimension");
  if (m > 0 && s.anchors.rows() != s.dim) {
    throw std::invalid_argument("anchor positions have wrong dimension");
  }
  if (!s.truth.allFinite() || (m > 0 && !s.anchors.allFinite())) {
    throw std::invalid_argument("positions must be finite");
  }

  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const auto& e = s.edges[k];
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw std::invalid_argument("edge " + edge_name(e) + " references an unknown sensor");
    }
    if (e.i == e.j) throw std::invalid_argument("self loop at sensor " + std::to_string(e.i));
    if (e.i > e.j) throw std::invalid_argument("edge " + edge_name(e) + " is not oriented i < j");
    if (!seen.emplace(e.i, e.j).second) {
      throw std::invalid_argument("duplicate edge " + edge_name(e));
    }
    if (k > 0 && std::pair(s.edges[k - 1].i, s.edges[k - 1].j) > std::pair(e.i, e.j)) {
      throw std::invalid_argument("edges are not in canonical order");
    }
    if (!positive_finite(e.range)) {
      throw std::invalid_argument("edge " + edge_name(e) + " range must be positive and finite");
    }
    if (!positive_finite(e.radius)) {
      throw std::invalid_argument("edge " + edge_name(e) + " radius must be positive and finite");
    }
  }

  std::set<std::pair<int, int>> seen_links;
  for (std::size_t k = 0; k < s.links.size(); ++k) {
    const auto& l = s.links[k];
    if (l.node < 0 || l.node >= n || l.anchor < 0 || l.anchor >= m) {
      throw std::invalid_argument("anchor link references an unknown sensor or anchor");
    }
    if (!seen_links.emplace(l.node, l.anchor).second) {
      throw std::invalid_argument("duplicate anchor link");
    }
    if (k > 0 && std::pair(s.links[k - 1].node, s.links[k - 1].anchor) > std::pair(l.node, l.anchor)) {
      throw std::invalid_argument("anchor links are not in canonical order");
    }
    if (!positive_finite(l.range) || !positive_finite(l.radius)) {
      throw std::invalid_argument("anchor link range and radius must be positive and finite");
    }
  }

  if (!is_connected(n, s.edges)) throw std::invalid_argument("graph is not connected");
  if (s.links.empty()) throw std::invalid_argument("no sensor has an anchor measurement");
}

void set_huber_radius(NetworkScenario& scenario, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Huber radius must be positive");
  for (auto& e : scenario.edges) e.radius = radius;
  for (auto& l : scenario.links) l.radius = radius;
}

double mean_degree(const NetworkScenario& scenario) {
  if (scenario.sensor_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(scenario.edges.size()) / scenario.sensor_count();
}

NetworkScenario apply_noise(const NetworkScenario& scenario, const NoiseModel& model,
                            std::uint64_t seed) {
  NetworkScenario out = scenario;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  auto true_edge = [&](const Edge& e) {
    return (scenario.truth.col(e.i) - scenario.truth.col(e.j)).norm();
  };
  auto true_link = [&](const AnchorLink& l) {
    return (scenario.truth.col(l.node) - scenario.anchors.col(l.anchor)).norm();
  };

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if (m.sigma < 0.0) throw std::invalid_argument("noise sigma must be nonnegative");
        std::vector<int> faulty;
        if constexpr (!std::is_same_v<M, GaussianNoise>) faulty = m.faulty;
        for (int f : faulty) {
          if (f < 0 || f >= scenario.sensor_count()) {
            throw std::invalid_argument("faulty node " + std::to_string(f) + " is not a sensor");
          }
        }
        if constexpr (std::is_same_v<M, OutlierNoise>) {
          if (m.sigma_outlier < 0.0) throw std::invalid_argument("outlier sigma must be nonnegative");
        }
        if constexpr (std::is_same_v<M, BiasNoise>) {
          if (!(m.bias_factor > 0.0)) throw std::invalid_argument("bias factor must be positive");
        }

        // One normal draw per measurement in canonical order, even for bias
        // measurements, so that the regular noise of healthy measurements does
        // not depend on which node is faulty.
        auto measure = [&](double truth, bool is_faulty) {
          const double z = unit(rng);
          if constexpr (std::is_same_v<M, GaussianNoise>) {
            return std::abs(truth + m.sigma * z);
          } else if constexpr (std::is_same_v<M, OutlierNoise>) {
            return std::abs(truth + (is_faulty ? m.sigma_outlier : m.sigma) * z);
          } else {
            return is_faulty ? m.bias_factor * truth : std::abs(truth + m.sigma * z);
          }
        };
        for (auto& e : out.edges) {
          e.range = measure(true_edge(e), contains(faulty, e.i) || contains(faulty, e.j));
        }
        for (auto& l : out.links) {
          l.range = measure(true_link(l), contains(faulty, l.node));
        }
      },
      model);
  return out;
}

Positions corner_anchors(int dim, double side) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("unsupported dimension");
  const int count = 1 << dim;
  Positions corners(dim, count);
  for (int c = 0; c < count; ++c) {
    for (int d = 0; d < dim; ++d) corners(d, c) = ((c >> d) & 1) ? side : 0.0;
  }
  return corners;
}

NetworkScenario generate_geometric_network(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.sensors < 1) throw std::invalid_argument("need at least one sensor");
  if (cfg.dim < 1 || cfg.dim > kMaxDim) throw std::invalid_argument("unsupported dimension");
  if (!(cfg.comm_radius > 0.0)) throw std::invalid_argument("communication radius must be positive");
  if (!(cfg.area_side > 0.0)) throw std::invalid_argument("area side must be positive");
  if (cfg.anchors.cols() > 0 && cfg.anchors.rows() != cfg.dim) {
    throw std::invalid_argument("anchor layout has wrong dimension");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side);

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    NetworkScenario s;
    s.dim = cfg.dim;
    s.anchors = cfg.anchors.cols() > 0 ? cfg.anchors : Positions(cfg.dim, 0);
    s.truth.resize(cfg.dim, cfg.sensors);
    for (int i = 0; i < cfg.sensors; ++i) {
      for (int d = 0; d < cfg.dim; ++d) s.truth(d, i) = coord(rng);
    }
    for (int i = 0; i < cfg.sensors; ++i) {
      for (int j = i + 1; j < cfg.sensors; ++j) {
        const double dist = (s.truth.col(i) - s.truth.col(j)).norm();
        if (dist <= cfg.comm_radius && dist > 0.0) {
          s.edges.push_back({i, j, dist, cfg.huber_radius});
        }
      }
      for (int k = 0; k < s.anchor_count(); ++k) {
        const double dist = (s.truth.col(i) - s.anchors.col(k)).norm();
        if (dist <= cfg.comm_radius && dist > 0.0) {
          s.links.push_back({i, k, dist, cfg.huber_radius});
        }
      }
    }
    if (!s.links.empty() && is_connected(cfg.sensors, s.edges)) return s;
  }
  throw std::runtime_error("cannot produce connected scenario");
}

Eigen::MatrixXi IncidenceStructure::dense_table(int edge_count) const {
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(edge_count, sensors);
  for (int i = 0; i < sensors; ++i) {
    for (const auto& ref : neighbors[i]) c(ref.edge, i) = ref.sign;
  }
  return c;
}

IncidenceStructure build_incidence(const NetworkScenario& scenario) {
  IncidenceStructure inc;
  inc.sensors = scenario.sensor_count();
  inc.neighbors.resize(inc.sensors);
  inc.node_links.resize(inc.sensors);
  for (int e = 0; e < static_cast<int>(scenario.edges.size()); ++e) {
    const auto& edge = scenario.edges[e];
    inc.neighbors[edge.i].push_back({e, edge.j, +1});
    inc.neighbors[edge.j].push_back({e, edge.i, -1});
  }
  for (int l = 0; l < static_cast<int>(scenario.links.size()); ++l) {
    inc.node_links[scenario.links[l].node].push_back(l);
  }
  for (int i = 0; i < inc.sensors; ++i) {
    inc.max_degree = std::max(inc.max_degree, inc.degree(i));
    inc.max_anchor_count =
        std::max(inc.max_anchor_count, static_cast<int>(inc.node_links[i].size()));
  }
  return inc;
}

double lipschitz_constant(const IncidenceStructure& inc) {
  if (inc.max_anchor_count == 0) {
    throw std::invalid_argument("no sensor has an anchor measurement");
  }
  return 2.0 + 2.0 * inc.max_degree + inc.max_anchor_count;
}

}  // namespace rhloc
