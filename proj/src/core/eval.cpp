#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace hesselm::eval {

namespace {

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  return {unique.begin(), unique.end()};
}

// Assigns each per-class shuffled item to folds round-robin and expands the
// result into (train, test) index pairs.
std::vector<FoldSplit> round_robin_folds(
    const std::map<std::string, std::vector<std::size_t>>& by_class, std::size_t n_items,
    std::size_t k, std::uint64_t seed, const std::string& item_name) {
  if (k < 2) throw ValidationError("k-fold split: need at least 2 folds");
  std::vector<std::size_t> fold_of(n_items, 0);
  Rng rng(seed);
  for (const auto& [label, indices] : by_class) {
    if (indices.size() < k) {
      throw ValidationError("k-fold split: class '" + label + "' has " +
                            std::to_string(indices.size()) + " " + item_name + ", fewer than " +
                            std::to_string(k) + " folds");
    }
    std::vector<std::size_t> shuffled = indices;
    rng.shuffle(shuffled);
    for (std::size_t i = 0; i < shuffled.size(); ++i) fold_of[shuffled[i]] = i % k;
  }
  std::vector<FoldSplit> folds(k);
  for (std::size_t i = 0; i < n_items; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (f == fold_of[i] ? folds[f].second : folds[f].first).push_back(i);
    }
  }
  return folds;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes; ++i) t += at(i, i);
  return t;
}

void ConfusionMatrix::accumulate(const ConfusionMatrix& other) {
  if (classes == 0) {
    *this = other;
    return;
  }
  if (other.classes != classes) throw DimensionError("confusion matrices of different sizes");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

BinaryCounts binary_counts(const ConfusionMatrix& cm, std::size_t positive) {
  BinaryCounts b;
  for (std::size_t t = 0; t < cm.classes; ++t) {
    for (std::size_t p = 0; p < cm.classes; ++p) {
      std::uint64_t n = cm.at(t, p);
      if (t == positive && p == positive) b.tp += n;
      else if (t == positive) b.fn += n;
      else if (p == positive) b.fp += n;
      else b.tn += n;
    }
  }
  return b;
}

MetricTriple metrics(const ConfusionMatrix& cm, std::size_t positive) {
  if (cm.total() == 0) throw ValidationError("metrics: empty confusion matrix");
  if (positive >= cm.classes) throw ValidationError("metrics: positive class out of range");
  BinaryCounts b = binary_counts(cm, positive);
  MetricTriple m;
  if (b.tp + b.fp > 0) m.precision = static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fp);
  if (b.tp + b.fn > 0) m.sensitivity = static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fn);
  m.overall_accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  return m;
}

std::vector<FoldSplit> stratified_kfold(const std::vector<std::string>& labels, std::size_t k,
                                        std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  return round_robin_folds(by_class, labels.size(), k, seed, "samples");
}

std::vector<FoldSplit> grouped_kfold(const std::vector<std::string>& labels,
                                     const std::vector<std::string>& groups, std::size_t k,
                                     std::uint64_t seed) {
  if (labels.size() != groups.size()) {
    throw DimensionError("grouped_kfold: labels and groups differ in length");
  }
  // group order: first appearance
  std::vector<std::string> group_names;
  std::map<std::string, std::size_t> group_index;
  std::vector<std::string> group_label;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto [it, inserted] = group_index.try_emplace(groups[i], group_names.size());
    if (inserted) {
      group_names.push_back(groups[i]);
      group_label.push_back(labels[i]);
      members.emplace_back();
    } else if (group_label[it->second] != labels[i]) {
      throw ValidationError("grouped_kfold: source '" + groups[i] + "' carries mixed labels");
    }
    members[it->second].push_back(i);
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t g = 0; g < group_names.size(); ++g) by_class[group_label[g]].push_back(g);
  std::vector<FoldSplit> group_folds =
      round_robin_folds(by_class, group_names.size(), k, seed, "source groups");

  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g : group_folds[f].first)
      folds[f].first.insert(folds[f].first.end(), members[g].begin(), members[g].end());
    for (std::size_t g : group_folds[f].second)
      folds[f].second.insert(folds[f].second.end(), members[g].begin(), members[g].end());
    std::sort(folds[f].first.begin(), folds[f].first.end());
    std::sort(folds[f].second.begin(), folds[f].second.end());
  }
  return folds;
}

CvResult cross_validate(const std::vector<sig::Segment>& segments, const EvalOptions& options) {
  if (segments.empty()) throw ValidationError("cross_validate: no segments");

  std::vector<std::string> labels(segments.size());
  std::vector<std::string> sources(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    labels[i] = segments[i].label;
    sources[i] = segments[i].source_id;
  }

  CvResult result;
  result.class_labels = sorted_classes(labels);
  if (result.class_labels.size() < 2) throw ValidationError("cross_validate: need at least 2 classes");
  auto pos = std::find(result.class_labels.begin(), result.class_labels.end(),
                       options.positive_class);
  if (pos == result.class_labels.end()) {
    throw ValidationError("cross_validate: positive class '" + options.positive_class +
                          "' does not occur in the dataset");
  }
  result.positive_index = static_cast<std::size_t>(pos - result.class_labels.begin());

  std::vector<features::SodpPointSet> sodps(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) sodps[i] = features::sodp(segments[i].samples);

  std::vector<FoldSplit> folds = options.group_by_source
                                     ? grouped_kfold(labels, sources, options.folds, options.seed)
                                     : stratified_kfold(labels, options.folds, options.seed);

  std::map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < result.class_labels.size(); ++c)
    class_index[result.class_labels[c]] = c;

  result.folds.resize(folds.size());
  parallel_for(folds.size(), options.train.threads, [&](std::size_t f) {
    const auto& [train_idx, test_idx] = folds[f];

    std::vector<features::SodpPointSet> train_points;
    train_points.reserve(train_idx.size());
    for (std::size_t i : train_idx) train_points.push_back(sodps[i]);

    features::PartitionSpec spec;
    spec.kind = options.features.kind;
    spec.region_count = options.features.resolved_region_count();
    spec.aggregation = options.features.aggregation;
    spec.bound = features::fit_bound(train_points, spec.kind);

    std::vector<std::vector<double>> train_raw(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i)
      train_raw[i] = features::extract(sodps[train_idx[i]], spec);
    features::Normalizer normalizer = features::fit_normalizer(train_raw);

    Matrix x_train(train_idx.size(), spec.feature_count());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      auto row = features::apply_normalizer(normalizer, train_raw[i]);
      std::copy(row.begin(), row.end(), &x_train(i, 0));
    }
    std::vector<std::string> y_train;
    y_train.reserve(train_idx.size());
    for (std::size_t i : train_idx) y_train.push_back(labels[i]);

    elm::TrainOptions topts = options.train;
    topts.threads = 1;  // folds already run in parallel
    elm::TrainResult trained = elm::train(x_train, y_train, topts);

    Matrix x_test(test_idx.size(), spec.feature_count());
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      auto raw = features::extract(sodps[test_idx[i]], spec);
      auto row = features::apply_normalizer(normalizer, raw);
      std::copy(row.begin(), row.end(), &x_test(i, 0));
    }
    elm::Prediction pred = elm::predict(trained.model, x_test);

    FoldReport report;
    report.fold = f;
    report.cm = ConfusionMatrix(result.class_labels.size());
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      std::size_t truth = class_index.at(labels[test_idx[i]]);
      std::size_t predicted = class_index.at(trained.model.class_labels[pred.class_index[i]]);
      report.cm.add(truth, predicted);
    }
    report.lambda = trained.model.lambda;
    report.press =
        trained.sweep ? trained.sweep->best_press : std::numeric_limits<double>::quiet_NaN();
    if (trained.sweep) report.candidates = trained.sweep->candidates;
    report.train_size = train_idx.size();
    report.test_size = test_idx.size();
    result.folds[f] = std::move(report);
  });

  result.aggregate = ConfusionMatrix(result.class_labels.size());
  for (const auto& fold : result.folds) result.aggregate.accumulate(fold.cm);
  result.aggregate_metrics = metrics(result.aggregate, result.positive_index);
  return result;
}

std::vector<SweepRow> lambda_sweep(const std::vector<sig::Segment>& segments,
                                   const EvalOptions& options, const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("lambda_sweep: empty grid");
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), options.train.threads, [&](std::size_t i) {
    EvalOptions forced = options;
    forced.train.forced_lambda = grid[i];
    forced.train.threads = 1;
    CvResult cv = cross_validate(segments, forced);
    double press_sum = 0.0;
    for (const auto& fold : cv.folds) press_sum += fold.press;
    rows[i] = {std::log(grid[i]), grid[i], press_sum / static_cast<double>(cv.folds.size()),
               cv.aggregate_metrics.overall_accuracy};
  });
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
  return rows;
}

}  // namespace hesselm::eval
