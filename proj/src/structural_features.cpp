#include "capire/structural_features.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace capire {

namespace {

void check_universe(const StructuralModel& model, const CourseSet& approved) {
  if (approved.universe() != model.graph().size()) {
    throw ValidationError("approved set refers to a different curriculum (" + std::to_string(approved.universe()) +
                          " courses, expected " + std::to_string(model.graph().size()) + ")");
  }
}

}  // namespace

StructuralModel::StructuralModel(const CurriculumGraph& graph, CourseSet backbone, CourseSet bottlenecks,
                                 StructuralOptions options)
    : graph_(&graph), backbone_(std::move(backbone)), bottlenecks_(std::move(bottlenecks)), options_(options) {
  if (backbone_.universe() != graph.size() || bottlenecks_.universe() != graph.size()) {
    throw ValidationError("backbone/bottleneck sets do not match the curriculum size");
  }
  for (CourseId v : backbone_.members()) backbone_credits_ += graph.course(v).credits;
}

StructuralModel StructuralModel::from_graph(const CurriculumGraph& graph, const BottleneckCriteria& criteria,
                                            StructuralOptions options, unsigned threads) {
  const auto betweenness = betweenness_centrality(graph, threads);
  return StructuralModel(graph, identify_backbone(graph), identify_bottlenecks(graph, betweenness, criteria),
                         options);
}

std::vector<std::string> StructuralModel::warnings() const {
  std::vector<std::string> out;
  if (bottlenecks_.empty()) {
    out.push_back("bottleneck set is empty: STRUCT_bottleneck_approval_ratio is constant (1.0)");
  }
  if (backbone_.empty()) out.push_back("backbone set is empty: backbone completion is undefined");
  return out;
}

double structural_credits_approved(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  Credits sum;
  for (CourseId v : approved.members())
    if (model.backbone().contains(v)) sum += model.graph().course(v).credits;
  return sum.value();
}

double backbone_completion_rate(const StructuralModel& model, const CourseSet& approved) {
  if (!model.backbone_credits().positive()) {
    throw ValidationError("backbone carries no credits; backbone completion rate is undefined");
  }
  return structural_credits_approved(model, approved) / model.backbone_credits().value();
}

double bottleneck_approval_ratio(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  const auto& k = model.bottlenecks();
  if (k.empty()) return 1.0;
  std::size_t hit = 0;
  for (CourseId v : k.members())
    if (approved.contains(v)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(k.size());
}

double blocked_credits(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  const auto& g = model.graph();
  Credits sum;
  for (CourseId v = 0; v < g.size(); ++v) {
    if (approved.contains(v)) continue;
    for (CourseId p : g.predecessors(v)) {
      if (!approved.contains(p)) {
        sum += g.course(v).credits;
        break;
      }
    }
  }
  return sum.value();
}

std::size_t distance_to_graduation(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  const auto& g = model.graph();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  // 0-1 BFS where entering a course costs 1 unless it is already approved.
  std::vector<std::size_t> dist(g.size(), kInf);
  std::deque<CourseId> queue;
  if (approved.empty()) {
    for (CourseId e : g.entries()) {
      dist[e] = 1;
      queue.push_back(e);
    }
  } else {
    for (CourseId v : approved.members()) {
      dist[v] = 0;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const CourseId v = queue.front();
    queue.pop_front();
    for (CourseId w : g.successors(v)) {
      const std::size_t cost = approved.contains(w) ? 0 : 1;
      if (dist[v] + cost < dist[w]) {
        dist[w] = dist[v] + cost;
        if (cost == 0) {
          queue.push_front(w);
        } else {
          queue.push_back(w);
        }
      }
    }
  }
  std::size_t best = kInf;
  for (CourseId t : g.terminals()) best = std::min(best, dist[t]);
  if (best == kInf) throw ValidationError("no path from the approved set to a terminal course");
  return best;
}

std::size_t prerequisites_met(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  const auto& g = model.graph();
  std::size_t count = 0;
  for (CourseId v = 0; v < g.size(); ++v) {
    if (approved.contains(v)) continue;
    for (CourseId p : g.predecessors(v))
      if (approved.contains(p)) ++count;
  }
  return count;
}

double mean_in_degree_approved(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  if (approved.empty()) return 0.0;
  std::size_t sum = 0;
  for (CourseId v : approved.members()) sum += model.graph().in_degree(v);
  return static_cast<double>(sum) / static_cast<double>(approved.size());
}

double mean_out_degree_approved(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  if (approved.empty()) return 0.0;
  std::size_t sum = 0;
  for (CourseId v : approved.members()) sum += model.graph().out_degree(v);
  return static_cast<double>(sum) / static_cast<double>(approved.size());
}

double module_diversity(const StructuralModel& model, const CourseSet& approved) {
  check_universe(model, approved);
  if (approved.size() <= 1) return 0.0;
  std::map<std::string_view, std::size_t> counts;
  for (CourseId v : approved.members()) ++counts[model.graph().course(v).module];
  const double total = static_cast<double>(approved.size());
  double entropy = 0.0;
  for (const auto& [module, count] : counts) {
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log(p);
  }
  if (model.options().normalise_module_diversity && counts.size() > 1) {
    entropy /= std::log(static_cast<double>(counts.size()));
  }
  return entropy;
}

std::array<double, StructuralFeatureVector::kSize> StructuralFeatureVector::values() const {
  return {structural_credits,
          backbone_completion,
          bottleneck_approval,
          blocked_credits,
          static_cast<double>(distance_to_graduation),
          static_cast<double>(prerequisites_met),
          mean_in_degree,
          mean_out_degree,
          module_diversity};
}

StructuralFeatureVector compute_structural_features(const StructuralModel& model, const CourseSet& approved) {
  StructuralFeatureVector f;
  f.structural_credits = structural_credits_approved(model, approved);
  f.backbone_completion = backbone_completion_rate(model, approved);
  f.bottleneck_approval = bottleneck_approval_ratio(model, approved);
  f.blocked_credits = blocked_credits(model, approved);
  f.distance_to_graduation = distance_to_graduation(model, approved);
  f.prerequisites_met = prerequisites_met(model, approved);
  f.mean_in_degree = mean_in_degree_approved(model, approved);
  f.mean_out_degree = mean_out_degree_approved(model, approved);
  f.module_diversity = module_diversity(model, approved);
  return f;
}

}  // namespace capire
