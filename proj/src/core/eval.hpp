#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/elm.hpp"
#include "core/features.hpp"
#include "core/signal.hpp"

namespace hesselm::eval {

// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t n) : classes(n), counts(n * n, 0) {}

  std::uint64_t& at(std::size_t truth, std::size_t predicted) {
    return counts[truth * classes + predicted];
  }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * classes + predicted];
  }
  void add(std::size_t truth, std::size_t predicted) { ++at(truth, predicted); }

  std::uint64_t total() const;
  std::uint64_t trace() const;
  void accumulate(const ConfusionMatrix& other);
};

struct BinaryCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

BinaryCounts binary_counts(const ConfusionMatrix& cm, std::size_t positive);

// Precision and sensitivity stay empty when their denominator is zero.
struct MetricTriple {
  std::optional<double> precision;
  std::optional<double> sensitivity;
  double overall_accuracy = 0.0;
};

MetricTriple metrics(const ConfusionMatrix& cm, std::size_t positive);

// (train indices, test indices); test sets partition the dataset.
using FoldSplit = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

// Per-class shuffled round-robin assignment; fold class proportions stay
// within one sample of the global proportions.
std::vector<FoldSplit> stratified_kfold(const std::vector<std::string>& labels, std::size_t k,
                                        std::uint64_t seed);

// Same scheme over source groups, keeping all segments of a source in the
// same fold. Each group must carry a single label.
std::vector<FoldSplit> grouped_kfold(const std::vector<std::string>& labels,
                                     const std::vector<std::string>& groups, std::size_t k,
                                     std::uint64_t seed);

struct FeatureOptions {
  features::PartitionKind kind = features::PartitionKind::inclined;
  std::size_t region_count = 0;  // 0 = per-kind default
  features::Aggregation aggregation = features::Aggregation::probability;

  std::size_t resolved_region_count() const {
    return region_count == 0 ? features::default_region_count(kind) : region_count;
  }
};

struct EvalOptions {
  FeatureOptions features;
  elm::TrainOptions train;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  std::string positive_class = "CHF";
  bool group_by_source = false;
};

struct FoldReport {
  std::size_t fold = 0;
  ConfusionMatrix cm;
  double lambda = 0.0;
  double press = 0.0;  // NaN when the variant does not run a sweep
  std::vector<elm::PressCandidate> candidates;  // the fold's full PRESS curve
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct CvResult {
  std::vector<std::string> class_labels;
  std::size_t positive_index = 0;
  std::vector<FoldReport> folds;
  ConfusionMatrix aggregate;
  MetricTriple aggregate_metrics;
};

// Leak-free k-fold evaluation: partition bound, normalizer, and model are all
// fitted on the training indices of each fold only.
CvResult cross_validate(const std::vector<sig::Segment>& segments, const EvalOptions& options);

struct SweepRow {
  double exponent = 0.0;  // ln(lambda)
  double lambda = 0.0;
  double mean_press = 0.0;
  double accuracy = 0.0;  // micro-averaged test accuracy
};

// Forces each grid lambda in turn (selection skipped) and records the mean
// training-fold PRESS next to the cross-validated accuracy.
std::vector<SweepRow> lambda_sweep(const std::vector<sig::Segment>& segments,
                                   const EvalOptions& options, const std::vector<double>& grid);

}  // namespace hesselm::eval
