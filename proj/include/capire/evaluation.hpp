#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "capire/forest.hpp"

namespace capire {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Per-class seeded shuffle, then a proportional cut: each class contributes
/// floor(n_c * fraction) rows to train, and the shortfall against
/// floor(n * fraction) goes to train from the class with the larger
/// fractional part (class 1 on ties). Throws ValidationError when a class has
/// fewer than 2 rows or the fraction is outside (0, 1).
SplitIndices stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct Metrics {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double f1 = 0.0;  // positive (dropout) class
  std::optional<double> auc;  // empty when labels hold a single class
  Confusion confusion;
};

Metrics metrics_from_confusion(const Confusion& c);

/// Threshold metrics predict positive when score >= threshold.
Metrics evaluate(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

/// Mann-Whitney probability that a random positive outranks a random
/// negative, ties counted 1/2. Throws ValidationError for single-class labels.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace capire
