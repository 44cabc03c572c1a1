#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace hesselm;
using namespace hesselm::eval;

namespace {

// Segments whose oscillation rate and amplitude are perfectly informative
// about the class, so both angular and radial partitions separate them.
std::vector<sig::Segment> informative_segments(std::size_t per_class, std::uint64_t seed,
                                               bool shuffle_labels = false,
                                               std::size_t length = 64) {
  Rng rng(seed);
  std::vector<sig::Segment> segments;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    bool chf = i < per_class;
    sig::Segment seg;
    seg.label = chf ? "CHF" : "NORMAL";
    seg.source_id = (chf ? "c" : "n") + std::to_string(i % 5);
    seg.start_index = i;
    double scale = chf ? 2.0 : 0.4;
    double step = chf ? 2.1 : 0.7;
    double phase = rng.next_unit();
    seg.samples.resize(length);
    for (std::size_t t = 0; t < length; ++t) {
      seg.samples[t] = scale * std::sin(step * t + phase) + 0.05 * rng.next_symmetric();
    }
    segments.push_back(std::move(seg));
  }
  if (shuffle_labels) {
    std::vector<std::string> labels;
    for (const auto& s : segments) labels.push_back(s.label);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < segments.size(); ++i) segments[i].label = labels[i];
  }
  return segments;
}

EvalOptions small_options() {
  EvalOptions opts;
  opts.features.kind = features::PartitionKind::inclined;
  opts.train.hidden = 12;
  opts.train.variant = elm::Variant::r_hesselm;
  opts.train.seed = 3;
  opts.folds = 5;
  opts.seed = 11;
  return opts;
}

}  // namespace

TEST_CASE("stratified_kfold: balanced classes split exactly") {
  std::vector<std::string> labels;
  for (int i = 0; i < 5; ++i) labels.push_back("A");
  for (int i = 0; i < 5; ++i) labels.push_back("B");
  auto folds = stratified_kfold(labels, 5, 1);
  REQUIRE(folds.size() == 5);
  for (const auto& [train, test] : folds) {
    CHECK(test.size() == 2);
    CHECK(train.size() == 8);
    std::set<std::string> test_labels;
    for (std::size_t i : test) test_labels.insert(labels[i]);
    CHECK(test_labels.size() == 2);  // one of each class
  }
}

TEST_CASE("stratified_kfold: uneven counts differ by at most one") {
  std::vector<std::string> labels;
  for (int i = 0; i < 6; ++i) labels.push_back("A");
  for (int i = 0; i < 5; ++i) labels.push_back("B");
  auto folds = stratified_kfold(labels, 5, 1);
  std::size_t lo = labels.size(), hi = 0;
  for (const auto& [train, test] : folds) {
    lo = std::min(lo, test.size());
    hi = std::max(hi, test.size());
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("stratified_kfold: folds partition the dataset") {
  Rng rng(50);
  std::vector<std::string> labels;
  for (int i = 0; i < 37; ++i) labels.push_back(rng.next_unit() < 0.4 ? "A" : "B");
  auto folds = stratified_kfold(labels, 4, 9);
  std::set<std::size_t> seen;
  for (const auto& [train, test] : folds) {
    std::set<std::size_t> train_set(train.begin(), train.end());
    for (std::size_t i : test) {
      CHECK(train_set.count(i) == 0);
      CHECK(seen.insert(i).second);  // test sets are disjoint
    }
    CHECK(train.size() + test.size() == labels.size());
  }
  CHECK(seen.size() == labels.size());
}

TEST_CASE("stratified_kfold: deterministic under the seed, class floor enforced") {
  std::vector<std::string> labels = {"A", "A", "A", "B", "B", "B"};
  CHECK(stratified_kfold(labels, 3, 7) == stratified_kfold(labels, 3, 7));
  CHECK_THROWS_AS(stratified_kfold(labels, 4, 7), ValidationError);
  CHECK_THROWS_AS(stratified_kfold(labels, 1, 7), ValidationError);
}

TEST_CASE("grouped_kfold: sources never straddle folds") {
  std::vector<std::string> labels, groups;
  for (int g = 0; g < 6; ++g) {
    for (int i = 0; i < 4; ++i) {
      labels.push_back(g < 3 ? "A" : "B");
      groups.push_back("src" + std::to_string(g));
    }
  }
  auto folds = grouped_kfold(labels, groups, 3, 5);
  for (const auto& [train, test] : folds) {
    std::set<std::string> test_groups, train_groups;
    for (std::size_t i : test) test_groups.insert(groups[i]);
    for (std::size_t i : train) train_groups.insert(groups[i]);
    for (const auto& g : test_groups) CHECK(train_groups.count(g) == 0);
  }
  std::vector<std::string> mixed_labels = labels;
  mixed_labels[0] = "B";  // source src0 now carries both labels
  CHECK_THROWS_AS(grouped_kfold(mixed_labels, groups, 3, 5), ValidationError);
}

TEST_CASE("metrics: textbook confusion matrix") {
  ConfusionMatrix cm(2);
  cm.at(0, 0) = 9;   // tp (class 0 positive)
  cm.at(0, 1) = 1;   // fn
  cm.at(1, 0) = 1;   // fp
  cm.at(1, 1) = 9;   // tn
  MetricTriple m = metrics(cm, 0);
  CHECK(*m.precision == doctest::Approx(0.9));
  CHECK(*m.sensitivity == doctest::Approx(0.9));
  CHECK(m.overall_accuracy == doctest::Approx(0.9));
}

TEST_CASE("metrics: perfect diagonal and undefined precision") {
  ConfusionMatrix perfect(3);
  perfect.at(0, 0) = 5;
  perfect.at(1, 1) = 4;
  perfect.at(2, 2) = 6;
  MetricTriple m = metrics(perfect, 1);
  CHECK(*m.precision == 1.0);
  CHECK(*m.sensitivity == 1.0);
  CHECK(m.overall_accuracy == 1.0);

  ConfusionMatrix no_pos(2);
  no_pos.at(1, 1) = 10;  // the positive class never occurs nor gets predicted
  MetricTriple u = metrics(no_pos, 0);
  CHECK_FALSE(u.precision.has_value());
  CHECK_FALSE(u.sensitivity.has_value());
  CHECK(u.overall_accuracy == 1.0);

  CHECK_THROWS_AS(metrics(ConfusionMatrix(2), 0), ValidationError);
}

TEST_CASE("cross_validate: perfectly informative features reach full accuracy") {
  auto segments = informative_segments(25, 60);
  CvResult cv = cross_validate(segments, small_options());
  CHECK(cv.aggregate_metrics.overall_accuracy == 1.0);
  CHECK(cv.class_labels == std::vector<std::string>{"CHF", "NORMAL"});
  CHECK(cv.positive_index == 0);
}

TEST_CASE("cross_validate: per-fold confusions sum to the aggregate") {
  auto segments = informative_segments(15, 61);
  CvResult cv = cross_validate(segments, small_options());
  ConfusionMatrix sum(cv.class_labels.size());
  std::uint64_t correct = 0, total = 0;
  for (const auto& fold : cv.folds) {
    sum.accumulate(fold.cm);
    correct += fold.cm.trace();
    total += fold.cm.total();
  }
  CHECK(sum.counts == cv.aggregate.counts);
  CHECK(cv.aggregate_metrics.overall_accuracy ==
        static_cast<double>(correct) / static_cast<double>(total));
  CHECK(total == segments.size());
}

TEST_CASE("cross_validate: label shuffling drops accuracy to chance") {
  double sum = 0.0;
  int repeats = 20;
  for (int rep = 0; rep < repeats; ++rep) {
    auto segments = informative_segments(15, 100 + rep, /*shuffle_labels=*/true);
    EvalOptions opts = small_options();
    opts.seed = 200 + rep;
    opts.train.hidden = 8;
    opts.folds = 3;
    CvResult cv = cross_validate(segments, opts);
    sum += cv.aggregate_metrics.overall_accuracy;
  }
  double mean = sum / repeats;
  CHECK(mean > 0.35);
  CHECK(mean < 0.65);
}

TEST_CASE("cross_validate: fitted state ignores test rows entirely") {
  auto segments = informative_segments(10, 62);
  EvalOptions opts = small_options();
  opts.folds = 2;

  auto folds = stratified_kfold(
      [&] {
        std::vector<std::string> labels;
        for (const auto& s : segments) labels.push_back(s.label);
        return labels;
      }(),
      opts.folds, opts.seed);

  auto fit_fold0 = [&](const std::vector<sig::Segment>& data) {
    std::vector<features::SodpPointSet> train_points;
    for (std::size_t i : folds[0].first) train_points.push_back(features::sodp(data[i].samples));
    features::PartitionSpec spec{features::PartitionKind::inclined, 17, 0.0,
                                 features::Aggregation::probability};
    spec.bound = features::fit_bound(train_points, spec.kind);
    std::vector<std::vector<double>> rows;
    for (const auto& pts : train_points) rows.push_back(features::extract(pts, spec));
    features::Normalizer norm = features::fit_normalizer(rows);
    return std::pair{spec.bound, norm};
  };

  auto [bound_before, norm_before] = fit_fold0(segments);
  auto mutated = segments;
  for (std::size_t i : folds[0].second) {
    for (double& v : mutated[i].samples) v *= 17.0;  // clobber every test row
  }
  auto [bound_after, norm_after] = fit_fold0(mutated);
  CHECK(bound_before == bound_after);
  CHECK(norm_before.min == norm_after.min);
  CHECK(norm_before.max == norm_after.max);
}

TEST_CASE("cross_validate: deterministic under identical options") {
  auto segments = informative_segments(12, 63);
  EvalOptions opts = small_options();
  CvResult a = cross_validate(segments, opts);
  CvResult b = cross_validate(segments, opts);
  REQUIRE(a.folds.size() == b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].cm.counts == b.folds[f].cm.counts);
    CHECK(a.folds[f].lambda == b.folds[f].lambda);
    CHECK(a.folds[f].press == b.folds[f].press);
  }

  EvalOptions threaded = opts;
  threaded.train.threads = 8;
  CvResult c = cross_validate(segments, threaded);
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].cm.counts == c.folds[f].cm.counts);
    CHECK(a.folds[f].lambda == c.folds[f].lambda);
  }
}

TEST_CASE("cross_validate: positive class must exist") {
  auto segments = informative_segments(10, 64);
  EvalOptions opts = small_options();
  opts.positive_class = "MISSING";
  CHECK_THROWS_AS(cross_validate(segments, opts), ValidationError);
}

TEST_CASE("lambda_sweep: single-value grid matches cross_validate at that lambda") {
  auto segments = informative_segments(10, 65);
  EvalOptions opts = small_options();
  double lambda = std::exp(-4.0);
  auto rows = lambda_sweep(segments, opts, {lambda});
  REQUIRE(rows.size() == 1);
  EvalOptions forced = opts;
  forced.train.forced_lambda = lambda;
  CvResult cv = cross_validate(segments, forced);
  CHECK(rows[0].accuracy == cv.aggregate_metrics.overall_accuracy);
  double press_sum = 0.0;
  for (const auto& fold : cv.folds) press_sum += fold.press;
  CHECK(rows[0].mean_press == press_sum / cv.folds.size());
  CHECK(rows[0].exponent == doctest::Approx(-4.0));
}

TEST_CASE("lambda_sweep: PRESS stays finite and positive over the default grid") {
  auto segments = informative_segments(12, 66);
  EvalOptions opts = small_options();
  opts.train.hidden = 10;
  auto rows = lambda_sweep(segments, opts, elm::default_lambda_grid());
  REQUIRE(rows.size() == 20);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.mean_press));
    CHECK(row.mean_press > 0.0);
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i].lambda < rows[i + 1].lambda);
}

TEST_CASE("lambda_sweep: the table is the fold-mean of the internal PRESS curves") {
  auto segments = informative_segments(14, 67);
  EvalOptions opts = small_options();
  opts.train.hidden = 10;
  std::vector<double> grid = elm::default_lambda_grid();
  auto rows = lambda_sweep(segments, opts, grid);
  CvResult cv = cross_validate(segments, opts);

  // same folds, same hidden layer: the sweep table must reproduce the mean of
  // the curves the internal selection already computed, value for value
  REQUIRE(rows.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (const auto& fold : cv.folds) {
      REQUIRE(fold.candidates.size() == grid.size());
      CHECK(fold.candidates[i].lambda == grid[i]);
      sum += fold.candidates[i].press;
    }
    CHECK(rows[i].mean_press == doctest::Approx(sum / cv.folds.size()).epsilon(1e-12));
  }

  // each fold's chosen lambda is the argmin of its own curve (ties -> larger)
  for (const auto& fold : cv.folds) {
    double best_lambda = fold.candidates.front().lambda;
    double best_press = fold.candidates.front().press;
    for (const auto& cand : fold.candidates) {
      if (cand.press < best_press || (cand.press == best_press && cand.lambda > best_lambda)) {
        best_press = cand.press;
        best_lambda = cand.lambda;
      }
    }
    CHECK(fold.lambda == best_lambda);
    CHECK(fold.press == best_press);
  }

  // and the tabulated minimum is the argmin of that shared mean curve
  const SweepRow* best_row = &rows.front();
  for (const auto& row : rows) {
    if (row.mean_press < best_row->mean_press ||
        (row.mean_press == best_row->mean_press && row.lambda > best_row->lambda)) {
      best_row = &row;
    }
  }
  double mean_best = 0.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (const auto& fold : cv.folds) sum += fold.candidates[i].press;
    if (i == 0 || sum <= mean_best) {
      mean_best = sum;
      best_index = i;
    }
  }
  CHECK(best_row->lambda == grid[best_index]);
}
