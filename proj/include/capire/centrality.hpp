#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capire/course_set.hpp"
#include "capire/curriculum.hpp"

namespace capire {

/// Bottleneck rule: betweenness at or above the nearest-rank quantile of the
/// nonzero betweenness values, and out-degree at least `min_out_degree`.
struct BottleneckCriteria {
  double betweenness_quantile = 0.90;
  std::size_t min_out_degree = 2;

  /// Throws ValidationError unless the quantile lies in (0, 1].
  void validate() const;
};

struct DegreeCentrality {
  std::size_t in_degree = 0;
  std::size_t out_degree = 0;
};

std::vector<DegreeCentrality> degree_centrality(const CurriculumGraph& graph);

/// Directed shortest-path betweenness over ordered pairs, divided by
/// (n-1)(n-2); zero for n < 3. Per-source contributions are reduced in source
/// order, so `threads` never changes the result.
std::vector<double> betweenness_centrality(const CurriculumGraph& graph, unsigned threads = 1);

/// Harmonic out-closeness: (1/(n-1)) * sum over u != v of 1/d(v,u).
std::vector<double> closeness_centrality(const CurriculumGraph& graph);

struct EigenvectorOptions {
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

/// Power iteration on the undirected projection, max-normalised to 1. The
/// iterate is x <- (A + I) x so bipartite projections (trees, stars) converge.
/// An edgeless graph yields all zeros and a warning. Throws ConvergenceError.
std::vector<double> eigenvector_centrality(const CurriculumGraph& graph, EigenvectorOptions options = {},
                                           std::vector<std::string>* warnings = nullptr);

/// Union of the nodes of every minimum-hop path from an entry to a terminal,
/// with the minimum taken per (entry, terminal) pair that has a path.
CourseSet identify_backbone(const CurriculumGraph& graph, std::span<const CourseId> entries,
                            std::span<const CourseId> terminals);
inline CourseSet identify_backbone(const CurriculumGraph& graph) {
  return identify_backbone(graph, graph.entries(), graph.terminals());
}

/// Nearest-rank quantile of the strictly positive values; nullopt if none.
std::optional<double> nonzero_quantile(std::span<const double> values, double quantile);

CourseSet identify_bottlenecks(const CurriculumGraph& graph, std::span<const double> betweenness,
                               const BottleneckCriteria& criteria);

struct CentralityRow {
  std::string code;
  std::size_t in_degree = 0;
  std::size_t out_degree = 0;
  double betweenness = 0.0;
  double closeness = 0.0;
  double eigenvector = 0.0;
  bool is_backbone = false;
  bool is_bottleneck = false;
};

/// Rows in code order (== CourseId order).
struct CentralityTable {
  std::vector<CentralityRow> rows;

  std::vector<double> betweenness() const;
  std::string to_csv() const;
};

struct CentralityOptions {
  BottleneckCriteria criteria;
  EigenvectorOptions eigenvector;
  unsigned threads = 1;
};

CentralityTable compute_centrality_table(const CurriculumGraph& graph, const CentralityOptions& options = {},
                                         std::vector<std::string>* warnings = nullptr);

/// Bottlenecks from an already computed table.
CourseSet identify_bottlenecks(const CurriculumGraph& graph, const CentralityTable& table,
                               const BottleneckCriteria& criteria);

struct ModuleCentrality {
  std::string module;
  std::size_t courses = 0;
  double mean_betweenness = 0.0;
};

/// Mean betweenness per module, modules in lexicographic order.
std::vector<ModuleCentrality> module_centrality_summary(const CurriculumGraph& graph, const CentralityTable& table);

}  // namespace capire
