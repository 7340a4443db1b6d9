#include "capire/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "capire/errors.hpp"
#include "capire/rng.hpp"

namespace capire {

// ---------------------------------------------------------------- Dataset

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<double> values, std::vector<int> labels)
    : names_(std::move(feature_names)), values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.size() != names_.size() * labels_.size()) {
    throw ValidationError("dataset has " + std::to_string(values_.size()) + " values for " +
                          std::to_string(labels_.size()) + " rows x " + std::to_string(names_.size()) + " columns");
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1, got " + std::to_string(y));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("dataset contains a non-finite value");
  }
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * cols());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw ValidationError("row index " + std::to_string(r) + " out of range");
    const auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return Dataset(names_, std::move(values), std::move(labels));
}

Dataset Dataset::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> cols_idx;
  for (const auto& name : names) {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ValidationError("unknown feature column '" + name + "'");
    cols_idx.push_back(static_cast<std::size_t>(it - names_.begin()));
  }
  std::vector<double> values;
  values.reserve(rows() * cols_idx.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c : cols_idx) values.push_back(at(r, c));
  return Dataset(std::vector<std::string>(names.begin(), names.end()), std::move(values), labels_);
}

Dataset Dataset::drop_column(std::string_view name) const {
  std::vector<std::string> keep;
  bool found = false;
  for (const auto& n : names_) {
    if (n == name) {
      found = true;
    } else {
      keep.push_back(n);
    }
  }
  if (!found) throw ValidationError("unknown feature column '" + std::string(name) + "'");
  return select_columns(keep);
}

void Dataset::require_trainable() const {
  if (rows() < 2) throw ValidationError("training set needs at least 2 rows");
  const auto positives = static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
  if (positives == 0 || positives == rows()) throw ValidationError("training set holds a single class");
  if (cols() == 0) throw ValidationError("training set has no feature columns");
}

// ---------------------------------------------------------------- config

std::size_t MaxFeatures::resolve(std::size_t features) const {
  if (features == 0) return 0;
  switch (rule) {
    case Rule::Sqrt:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(features)))));
    case Rule::All:
      return features;
    case Rule::Fixed:
      return std::clamp<std::size_t>(count, 1, features);
  }
  return features;
}

void ForestConfig::validate() const {
  if (n_trees < 1) throw ValidationError("n_trees must be >= 1");
  if (min_samples_split < 2) throw ValidationError("min_samples_split must be >= 2");
  if (max_depth && *max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (max_features.rule == MaxFeatures::Rule::Fixed && max_features.count < 1) {
    throw ValidationError("max_features must be >= 1");
  }
}

// ---------------------------------------------------------------- trees

double DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature >= 0) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

struct Sample {
  std::size_t row;
  double weight;       // multiplicity x class weight
  std::size_t count;   // bootstrap multiplicity
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double children_impurity = 0.0;  // w_l * gini_l + w_r * gini_r
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestConfig& config, const std::vector<std::size_t>& candidates,
              std::size_t max_features, Rng rng)
      : data_(data), config_(config), candidates_(candidates), max_features_(max_features), rng_(rng) {}

  DecisionTree build(std::vector<Sample> samples) {
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Sample>& samples, std::size_t depth) {
    double w = 0.0, w1 = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
      w += s.weight;
      if (data_.labels()[s.row] == 1) w1 += s.weight;
      n += s.count;
    }
    const int index = static_cast<int>(tree_.nodes.size());
    DecisionTree::Node node;
    node.weight = w;
    node.value = w > 0.0 ? w1 / w : 0.0;
    node.impurity = gini_impurity(w1, w);
    tree_.nodes.push_back(node);

    const bool pure = w1 == 0.0 || w1 == w;
    const bool depth_reached = config_.max_depth && depth >= *config_.max_depth;
    if (pure || depth_reached || n < config_.min_samples_split) return index;

    const auto split = find_split(samples, w, w1);
    if (split.feature < 0) return index;

    const auto f = static_cast<std::size_t>(split.feature);
    std::vector<Sample> left, right;
    for (const auto& s : samples) (data_.at(s.row, f) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    tree_.nodes[static_cast<std::size_t>(index)].feature = split.feature;
    tree_.nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].left = l;
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  SplitChoice find_split(const std::vector<Sample>& samples, double w, double w1) {
    SplitChoice best;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pool = candidates_;
    std::vector<std::pair<double, std::size_t>> sorted(samples.size());
    std::size_t evaluated = 0;
    for (std::size_t k = 0; k < pool.size() && evaluated < max_features_; ++k) {
      std::swap(pool[k], pool[k + uniform_index(rng_, pool.size() - k)]);
      const std::size_t f = pool[k];
      for (std::size_t i = 0; i < samples.size(); ++i) sorted[i] = {data_.at(samples[i].row, f), i};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;  // constant in this node
      ++evaluated;

      double wl = 0.0, wl1 = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& s = samples[sorted[i].second];
        wl += s.weight;
        if (data_.labels()[s.row] == 1) wl1 += s.weight;
        const double a = sorted[i].first;
        const double b = sorted[i + 1].first;
        if (a == b) continue;
        const double wr = w - wl;
        const double wr1 = w1 - wl1;
        const double score = wl * gini_impurity(wl1, wl) + wr * gini_impurity(wr1, wr);
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        const bool better = score < best_score ||
                            (score == best_score && (static_cast<int>(f) < best.feature ||
                                                     (static_cast<int>(f) == best.feature && threshold < best.threshold)));
        if (better) {
          best_score = score;
          best = {static_cast<int>(f), threshold, score};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestConfig& config_;
  const std::vector<std::size_t>& candidates_;
  std::size_t max_features_;
  Rng rng_;
  DecisionTree tree_;
};

}  // namespace

std::vector<double> mdi_importances(const std::vector<DecisionTree>& trees, std::size_t features) {
  std::vector<double> total(features, 0.0);
  for (const auto& tree : trees) {
    if (tree.nodes.empty() || tree.nodes[0].weight <= 0.0) continue;
    const double root = tree.nodes[0].weight;
    std::vector<double> per_tree(features, 0.0);
    for (const auto& n : tree.nodes) {
      if (n.feature < 0) continue;
      const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
      const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
      const double decrease = n.weight * n.impurity - l.weight * l.impurity - r.weight * r.impurity;
      per_tree[static_cast<std::size_t>(n.feature)] += decrease / root;
    }
    for (std::size_t f = 0; f < features; ++f) total[f] += per_tree[f];
  }
  if (!trees.empty()) {
    for (auto& v : total) v /= static_cast<double>(trees.size());
  }
  for (auto& v : total) v = std::max(v, 0.0);
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

ForestModel::ForestModel(ForestConfig config, std::vector<std::string> feature_names, std::vector<DecisionTree> trees)
    : config_(config), names_(std::move(feature_names)), trees_(std::move(trees)) {
  for (const auto& tree : trees_) {
    if (tree.nodes.empty()) throw ValidationError("forest contains an empty tree");
    for (const auto& n : tree.nodes) {
      if (n.feature >= static_cast<int>(names_.size())) throw ValidationError("tree node refers to unknown feature");
      if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= tree.nodes.size() ||
                             static_cast<std::size_t>(n.right) >= tree.nodes.size())) {
        throw ValidationError("tree node has invalid children");
      }
    }
  }
  importances_ = mdi_importances(trees_, names_.size());
}

double ForestModel::predict_proba(std::span<const double> row) const {
  if (row.size() != names_.size()) {
    throw ValidationError("row has " + std::to_string(row.size()) + " features, model expects " +
                          std::to_string(names_.size()));
  }
  if (trees_.empty()) throw ValidationError("model has no trees");
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(row);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> ForestModel::predict_proba(const Dataset& data) const {
  if (data.feature_names() != names_) {
    if (data.cols() != names_.size()) {
      throw ValidationError("dataset has " + std::to_string(data.cols()) + " features, model expects " +
                            std::to_string(names_.size()));
    }
    throw ValidationError("dataset feature columns differ from the training columns");
  }
  std::vector<double> out(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) out[r] = predict_proba(data.row(r));
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json config_to_json(const ForestConfig& c) {
  Json j;
  j["n_trees"] = c.n_trees;
  j["max_depth"] = c.max_depth ? Json(*c.max_depth) : Json(nullptr);
  j["min_samples_split"] = c.min_samples_split;
  j["class_weight"] = c.class_weight == ClassWeight::Balanced ? "balanced" : "none";
  switch (c.max_features.rule) {
    case MaxFeatures::Rule::Sqrt: j["max_features"] = "sqrt"; break;
    case MaxFeatures::Rule::All: j["max_features"] = "all"; break;
    case MaxFeatures::Rule::Fixed: j["max_features"] = c.max_features.count; break;
  }
  j["bootstrap"] = c.bootstrap;
  j["seed"] = c.seed;
  return j;
}

ForestConfig config_from_json(const Json& j) {
  ForestConfig c;
  c.n_trees = j.at("n_trees").get<std::size_t>();
  if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<std::size_t>();
  c.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  const auto weight = j.at("class_weight").get<std::string>();
  if (weight == "balanced") {
    c.class_weight = ClassWeight::Balanced;
  } else if (weight == "none") {
    c.class_weight = ClassWeight::None;
  } else {
    throw ValidationError("unknown class_weight '" + weight + "'");
  }
  const auto& mf = j.at("max_features");
  if (mf.is_string()) {
    const auto rule = mf.get<std::string>();
    if (rule == "sqrt") {
      c.max_features = MaxFeatures::sqrt();
    } else if (rule == "all") {
      c.max_features = MaxFeatures::all();
    } else {
      throw ValidationError("unknown max_features rule '" + rule + "'");
    }
  } else {
    c.max_features = MaxFeatures::fixed(mf.get<std::size_t>());
  }
  c.bootstrap = j.at("bootstrap").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string ForestModel::to_json() const {
  Json j;
  j["format"] = "capire-forest";
  j["version"] = 1;
  j["config"] = config_to_json(config_);
  j["feature_names"] = names_;
  j["importances"] = importances_;
  Json trees = Json::array();
  for (const auto& tree : trees_) {
    Json t;
    Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
         value = Json::array(), weight = Json::array(), impurity = Json::array();
    for (const auto& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
      weight.push_back(n.weight);
      impurity.push_back(n.impurity);
    }
    t["feature"] = std::move(feature);
    t["threshold"] = std::move(threshold);
    t["left"] = std::move(left);
    t["right"] = std::move(right);
    t["value"] = std::move(value);
    t["weight"] = std::move(weight);
    t["impurity"] = std::move(impurity);
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

ForestModel ForestModel::from_json(std::string_view text) {
  try {
    const auto j = Json::parse(text);
    if (j.value("format", "") != "capire-forest") throw ValidationError("not a serialised forest model");
    auto config = config_from_json(j.at("config"));
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const auto weight = t.at("weight").get<std::vector<double>>();
      const auto impurity = t.at("impurity").get<std::vector<double>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n ||
          weight.size() != n || impurity.size() != n) {
        throw ValidationError("tree arrays have mismatched lengths");
      }
      DecisionTree tree;
      tree.nodes.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        tree.nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i], weight[i], impurity[i]};
      }
      trees.push_back(std::move(tree));
    }
    return ForestModel(config, std::move(names), std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed forest model: ") + e.what());
  }
}

ForestModel train(const Dataset& data, const ForestConfig& config, unsigned threads) {
  config.validate();
  data.require_trainable();
  const std::size_t n = data.rows();

  std::vector<std::size_t> candidates;
  for (std::size_t f = 0; f < data.cols(); ++f) {
    const double first = data.at(0, f);
    for (std::size_t r = 1; r < n; ++r) {
      if (data.at(r, f) != first) {
        candidates.push_back(f);
        break;
      }
    }
  }
  const std::size_t max_features = config.max_features.resolve(candidates.size());

  double class_weight[2] = {1.0, 1.0};
  if (config.class_weight == ClassWeight::Balanced) {
    const auto positives = static_cast<double>(std::count(data.labels().begin(), data.labels().end(), 1));
    const auto total = static_cast<double>(n);
    class_weight[0] = total / (2.0 * (total - positives));
    class_weight[1] = total / (2.0 * positives);
  }

  std::vector<DecisionTree> trees(config.n_trees);
  auto grow_tree = [&](std::size_t t) {
    Rng rng(substream_seed(config.seed, t));
    std::vector<std::size_t> counts(n, config.bootstrap ? 0 : 1);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) ++counts[uniform_index(rng, n)];
    }
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[i] == 0) continue;
      samples.push_back({i, static_cast<double>(counts[i]) * class_weight[data.labels()[i]], counts[i]});
    }
    TreeBuilder builder(data, config, candidates, max_features, rng);
    trees[t] = builder.build(std::move(samples));
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(config.n_trees)));
  if (workers == 1) {
    for (std::size_t t = 0; t < config.n_trees; ++t) grow_tree(t);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < config.n_trees; t += workers) grow_tree(t);
      });
    }
  }
  return ForestModel(config, data.feature_names(), std::move(trees));
}

std::vector<NamedImportance> feature_importance(const ForestModel& model) {
  std::vector<NamedImportance> out;
  for (std::size_t f = 0; f < model.feature_names().size(); ++f) {
    out.push_back({model.feature_names()[f], model.importances()[f]});
  }
  std::sort(out.begin(), out.end(), [](const NamedImportance& a, const NamedImportance& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.name < b.name;
  });
  return out;
}

}  // namespace capire
