#include "capire/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <thread>

#include "capire/csv.hpp"

namespace capire {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
constexpr double kTieTolerance = 1e-12;

std::vector<std::size_t> hop_distances(const CurriculumGraph& graph, CourseId source, bool forward) {
  std::vector<std::size_t> dist(graph.size(), kUnreached);
  std::queue<CourseId> queue;
  dist[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const CourseId v = queue.front();
    queue.pop();
    for (CourseId w : forward ? graph.successors(v) : graph.predecessors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        queue.push(w);
      }
    }
  }
  return dist;
}

// Brandes single-source dependency accumulation.
std::vector<double> source_dependencies(const CurriculumGraph& graph, CourseId s) {
  const std::size_t n = graph.size();
  std::vector<double> sigma(n, 0.0), delta(n, 0.0);
  std::vector<std::size_t> dist(n, kUnreached);
  std::vector<CourseId> order;
  order.reserve(n);
  std::queue<CourseId> queue;
  sigma[s] = 1.0;
  dist[s] = 0;
  queue.push(s);
  while (!queue.empty()) {
    const CourseId v = queue.front();
    queue.pop();
    order.push_back(v);
    for (CourseId w : graph.successors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        queue.push(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const CourseId w = *it;
    for (CourseId v : graph.predecessors(w)) {
      if (dist[v] != kUnreached && dist[v] + 1 == dist[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
    }
  }
  delta[s] = 0.0;
  return delta;
}

}  // namespace

void BottleneckCriteria::validate() const {
  if (!(betweenness_quantile > 0.0 && betweenness_quantile <= 1.0)) {
    throw ValidationError("bottleneck betweenness quantile must lie in (0, 1]");
  }
}

std::vector<DegreeCentrality> degree_centrality(const CurriculumGraph& graph) {
  std::vector<DegreeCentrality> out(graph.size());
  for (CourseId v = 0; v < graph.size(); ++v) out[v] = {graph.in_degree(v), graph.out_degree(v)};
  return out;
}

std::vector<double> betweenness_centrality(const CurriculumGraph& graph, unsigned threads) {
  const std::size_t n = graph.size();
  std::vector<double> result(n, 0.0);
  if (n < 3) return result;

  std::vector<std::vector<double>> per_source(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (CourseId s = 0; s < n; ++s) per_source[s] = source_dependencies(graph, s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < n; s += workers) per_source[s] = source_dependencies(graph, static_cast<CourseId>(s));
      });
    }
  }
  for (CourseId s = 0; s < n; ++s)
    for (std::size_t v = 0; v < n; ++v) result[v] += per_source[s][v];

  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (double& b : result) b *= scale;
  return result;
}

std::vector<double> closeness_centrality(const CurriculumGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<double> result(n, 0.0);
  if (n < 2) return result;
  for (CourseId v = 0; v < n; ++v) {
    const auto dist = hop_distances(graph, v, true);
    double sum = 0.0;
    for (CourseId u = 0; u < n; ++u) {
      if (u != v && dist[u] != kUnreached) sum += 1.0 / static_cast<double>(dist[u]);
    }
    result[v] = sum / static_cast<double>(n - 1);
  }
  return result;
}

std::vector<double> eigenvector_centrality(const CurriculumGraph& graph, EigenvectorOptions options,
                                           std::vector<std::string>* warnings) {
  const std::size_t n = graph.size();
  if (graph.edge_count() == 0) {
    if (warnings) warnings->push_back("eigenvector centrality: graph has no edges, all values set to 0");
    return std::vector<double>(n, 0.0);
  }
  std::vector<std::vector<CourseId>> neighbours(n);
  for (auto [a, b] : graph.edges()) {
    neighbours[a].push_back(b);
    neighbours[b].push_back(a);
  }
  std::vector<double> x(n, 1.0), next(n);
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    double peak = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (CourseId w : neighbours[v]) s += x[w];
      next[v] = s;
      peak = std::max(peak, s);
    }
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= peak;
      residual = std::max(residual, std::fabs(next[v] - x[v]));
    }
    x.swap(next);
    if (residual < options.tolerance) return x;
  }
  throw ConvergenceError(options.max_iterations, residual);
}

CourseSet identify_backbone(const CurriculumGraph& graph, std::span<const CourseId> entries,
                            std::span<const CourseId> terminals) {
  CourseSet backbone(graph.size());
  std::vector<std::vector<std::size_t>> to_terminal;
  to_terminal.reserve(terminals.size());
  for (CourseId t : terminals) to_terminal.push_back(hop_distances(graph, t, false));

  for (CourseId e : entries) {
    const auto from_entry = hop_distances(graph, e, true);
    for (std::size_t ti = 0; ti < terminals.size(); ++ti) {
      const std::size_t shortest = from_entry[terminals[ti]];
      if (shortest == kUnreached) continue;
      for (CourseId v = 0; v < graph.size(); ++v) {
        if (from_entry[v] != kUnreached && to_terminal[ti][v] != kUnreached &&
            from_entry[v] + to_terminal[ti][v] == shortest) {
          backbone.insert(v);
        }
      }
    }
  }
  return backbone;
}

std::optional<double> nonzero_quantile(std::span<const double> values, double quantile) {
  std::vector<double> positive;
  for (double v : values)
    if (v > 0.0) positive.push_back(v);
  if (positive.empty()) return std::nullopt;
  std::sort(positive.begin(), positive.end());
  const double m = static_cast<double>(positive.size());
  auto rank = static_cast<std::size_t>(std::ceil(quantile * m - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, positive.size());
  return positive[rank - 1];
}

CourseSet identify_bottlenecks(const CurriculumGraph& graph, std::span<const double> betweenness,
                               const BottleneckCriteria& criteria) {
  criteria.validate();
  CourseSet bottlenecks(graph.size());
  const auto threshold = nonzero_quantile(betweenness, criteria.betweenness_quantile);
  if (!threshold) return bottlenecks;
  for (CourseId v = 0; v < graph.size(); ++v) {
    // Values tied in exact arithmetic may differ in the last bits after summation.
    if (betweenness[v] >= *threshold - kTieTolerance && graph.out_degree(v) >= criteria.min_out_degree) {
      bottlenecks.insert(v);
    }
  }
  return bottlenecks;
}

CourseSet identify_bottlenecks(const CurriculumGraph& graph, const CentralityTable& table,
                               const BottleneckCriteria& criteria) {
  const auto b = table.betweenness();
  return identify_bottlenecks(graph, b, criteria);
}

std::vector<double> CentralityTable::betweenness() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.betweenness);
  return out;
}

std::string CentralityTable::to_csv() const {
  std::string out = "code,in_degree,out_degree,betweenness,closeness,eigenvector,is_backbone,is_bottleneck\n";
  for (const auto& r : rows) {
    out += csv::join({r.code, std::to_string(r.in_degree), std::to_string(r.out_degree), csv::fixed(r.betweenness),
                      csv::fixed(r.closeness), csv::fixed(r.eigenvector), r.is_backbone ? "true" : "false",
                      r.is_bottleneck ? "true" : "false"});
    out += '\n';
  }
  return out;
}

CentralityTable compute_centrality_table(const CurriculumGraph& graph, const CentralityOptions& options,
                                         std::vector<std::string>* warnings) {
  const auto degrees = degree_centrality(graph);
  const auto betweenness = betweenness_centrality(graph, options.threads);
  const auto closeness = closeness_centrality(graph);
  const auto eigen = eigenvector_centrality(graph, options.eigenvector, warnings);
  const auto backbone = identify_backbone(graph);
  const auto bottlenecks = identify_bottlenecks(graph, betweenness, options.criteria);

  CentralityTable table;
  for (CourseId v = 0; v < graph.size(); ++v) {
    table.rows.push_back({graph.course(v).code, degrees[v].in_degree, degrees[v].out_degree, betweenness[v],
                          closeness[v], eigen[v], backbone.contains(v), bottlenecks.contains(v)});
  }
  return table;
}

std::vector<ModuleCentrality> module_centrality_summary(const CurriculumGraph& graph, const CentralityTable& table) {
  std::map<std::string, std::pair<std::size_t, double>> acc;
  for (CourseId v = 0; v < graph.size(); ++v) {
    auto& [count, sum] = acc[graph.course(v).module];
    ++count;
    sum += table.rows.at(v).betweenness;
  }
  std::vector<ModuleCentrality> out;
  for (const auto& [module, cs] : acc) {
    out.push_back({module, cs.first, cs.second / static_cast<double>(cs.first)});
  }
  return out;
}

}  // namespace capire
