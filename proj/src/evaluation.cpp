#include "capire/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capire/errors.hpp"
#include "capire/rng.hpp"

namespace capire {

namespace {

void check_lengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("scores and labels differ in length (" + std::to_string(scores.size()) + " vs " +
                          std::to_string(labels.size()) + ")");
  }
  if (scores.empty()) throw ValidationError("cannot evaluate an empty score set");
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
  }
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValidationError("labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw ValidationError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                            " rows; stratified split needs at least 2");
    }
  }

  Rng rng(seed);
  for (auto& members : by_class) shuffle(members, rng);

  std::size_t take[2];
  double frac[2];
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * train_fraction;
    take[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - static_cast<double>(take[c]);
  }
  const auto target = static_cast<std::size_t>(std::floor(static_cast<double>(labels.size()) * train_fraction));
  std::size_t shortfall = target > take[0] + take[1] ? target - take[0] - take[1] : 0;
  const int first = frac[1] >= frac[0] ? 1 : 0;
  for (int c : {first, 1 - first}) {
    if (shortfall > 0 && take[c] < by_class[c].size()) {
      ++take[c];
      --shortfall;
    }
  }
  for (int c = 0; c < 2; ++c) {
    // Each partition keeps at least one row of each class.
    take[c] = std::clamp<std::size_t>(take[c], 1, by_class[c].size() - 1);
  }

  SplitIndices out;
  for (int c = 0; c < 2; ++c) {
    out.train.insert(out.train.end(), by_class[c].begin(), by_class[c].begin() + static_cast<long>(take[c]));
    out.test.insert(out.test.end(), by_class[c].begin() + static_cast<long>(take[c]), by_class[c].end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  const auto split = stratified_split(data.labels(), train_fraction, seed);
  return {data.select_rows(split.train), data.select_rows(split.test)};
}

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_lengths(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

Metrics metrics_from_confusion(const Confusion& c) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.confusion = c;
  const std::size_t n = c.tp + c.fp + c.tn + c.fn;
  m.accuracy = ratio(c.tp + c.tn, n);
  const double tpr = ratio(c.tp, c.tp + c.fn);
  const double tnr = ratio(c.tn, c.tn + c.fp);
  m.balanced_accuracy = (tpr + tnr) / 2.0;
  const double precision = ratio(c.tp, c.tp + c.fp);
  m.f1 = precision + tpr > 0.0 ? 2.0 * precision * tpr / (precision + tpr) : 0.0;
  return m;
}

Metrics evaluate(std::span<const double> scores, std::span<const int> labels, double threshold) {
  auto m = metrics_from_confusion(confusion_at(scores, labels, threshold));
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives > 0 && positives < labels.size()) m.auc = roc_auc(scores, labels);
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sweep tie groups in ascending score: each positive beats every negative
  // seen in earlier groups and ties with negatives in its own group.
  double wins = 0.0;
  std::size_t negatives_below = 0, positives = 0, negatives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t p = 0, q = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? p : q)++;
      ++j;
    }
    wins += static_cast<double>(p) * static_cast<double>(negatives_below) +
            0.5 * static_cast<double>(p) * static_cast<double>(q);
    negatives_below += q;
    positives += p;
    negatives += q;
    i = j;
  }
  if (positives == 0 || negatives == 0) throw ValidationError("AUC is undefined for single-class labels");
  return wins / (static_cast<double>(positives) * static_cast<double>(negatives));
}

}  // namespace capire
