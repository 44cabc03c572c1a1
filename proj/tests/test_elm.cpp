#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/elm.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/textio.hpp"
#include "oracles.hpp"

using namespace hesselm;
using namespace hesselm::elm;

namespace {

// Two well-separated Gaussian-ish clusters in 2-D.
void separable_clusters(std::size_t per_class, Rng& rng, Matrix& x,
                        std::vector<std::string>& labels) {
  x = Matrix(2 * per_class, 2);
  labels.clear();
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    bool first = i < per_class;
    x(i, 0) = (first ? -2.0 : 2.0) + 0.2 * rng.next_symmetric();
    x(i, 1) = (first ? -2.0 : 2.0) + 0.2 * rng.next_symmetric();
    labels.push_back(first ? "A" : "B");
  }
}

Matrix random_targets(std::size_t n, std::size_t c, Rng& rng) {
  Matrix t(n, c);
  for (double& v : t.data()) v = rng.next_symmetric();
  return t;
}

struct WarningCapture {
  std::vector<std::string> lines;
  WarningCapture() {
    set_log_handler([this](const std::string& line) { lines.push_back(line); });
  }
  ~WarningCapture() { set_log_handler(nullptr); }
};

}  // namespace

TEST_CASE("init_hidden: deterministic under the seed, bounded draws") {
  HiddenLayer a = init_hidden(3, 10, 42);
  HiddenLayer b = init_hidden(3, 10, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
  HiddenLayer c = init_hidden(3, 10, 43);
  CHECK_FALSE(a.weights == c.weights);

  HiddenLayer tiny = init_hidden(1, 1, 7);
  CHECK(tiny.weights.rows() == 1);
  CHECK(tiny.weights.cols() == 1);
  CHECK(tiny.biases.size() == 1);
  CHECK(std::fabs(tiny.weights(0, 0)) <= 1.0);
  CHECK(std::fabs(tiny.biases[0]) <= 1.0);

  CHECK_THROWS_AS(init_hidden(3, 0, 1), ValidationError);
}

TEST_CASE("init_hidden: empirical moments of the uniform draws") {
  HiddenLayer layer = init_hidden(100, 1000, 2024);
  double sum = 0.0;
  for (double v : layer.weights.data()) {
    CHECK(std::fabs(v) <= 1.0);
    sum += v;
  }
  CHECK(std::fabs(sum / 100000.0) < 0.01);
}

TEST_CASE("hidden_output: activation at zero") {
  HiddenLayer layer;
  layer.weights = Matrix(2, 3);
  layer.biases = {0.0, 0.0, 0.0};
  Matrix x(4, 2);
  Matrix hs = hidden_output(x, layer, Activation::sigmoid);
  for (double v : hs.data()) CHECK(v == 0.5);
  Matrix ht = hidden_output(x, layer, Activation::tanh);
  for (double v : ht.data()) CHECK(v == 0.0);
}

TEST_CASE("hidden_output: matches a scalar loop oracle") {
  Rng rng(30);
  Matrix x = oracle::random_matrix(3, 2, rng);
  HiddenLayer layer;
  layer.weights = Matrix::from_rows({{0.3, -0.7, 0.1}, {0.9, 0.2, -0.4}});
  layer.biases = {0.05, -0.15, 0.25};
  Matrix h = hidden_output(x, layer, Activation::sigmoid);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      double z = layer.biases[k];
      for (std::size_t j = 0; j < 2; ++j) z += x(i, j) * layer.weights(j, k);
      CHECK(h(i, k) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(hidden_output(Matrix(3, 5), layer, Activation::sigmoid), DimensionError);
}

TEST_CASE("encode_targets: plus-minus one-hot rows") {
  Matrix t = encode_targets({"CHF", "NORMAL", "CHF"}, {"CHF", "NORMAL"});
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 1) == -1.0);
  CHECK(t(1, 0) == -1.0);
  CHECK(t(1, 1) == 1.0);
  Matrix t3 = encode_targets({"c"}, {"a", "b", "c"});
  CHECK(t3(0, 0) == -1.0);
  CHECK(t3(0, 1) == -1.0);
  CHECK(t3(0, 2) == 1.0);
  CHECK_THROWS_AS(encode_targets({"X"}, {"A", "B"}), ValidationError);
}

TEST_CASE("ridge_fit: three routes agree on weights and leverages") {
  Rng rng(31);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{12, 5},
                      {10, 10},
                      {8, 20}}) {
    Matrix h = oracle::random_matrix(n, m, rng);
    Matrix t = random_targets(n, 2, rng);
    for (double lambda : {std::exp(-12.0), std::exp(-3.0), 0.5}) {
      RidgeFit direct = ridge_fit(h, t, lambda, RidgePath::direct);
      RidgeFit eig = ridge_fit(h, t, lambda, RidgePath::gram_eigen);
      RidgeFit hess = ridge_fit(h, t, lambda, RidgePath::hessenberg);
      CHECK(oracle::rel_error(eig.weights, direct.weights) < 1e-8);
      CHECK(oracle::rel_error(hess.weights, direct.weights) < 1e-8);
      for (std::size_t j = 0; j < n; ++j) {
        // leverages live on [0, 1]; agreement is relative to that unit scale
        CHECK(std::fabs(eig.hat_diag[j] - direct.hat_diag[j]) < 1e-8);
        CHECK(std::fabs(hess.hat_diag[j] - direct.hat_diag[j]) < 1e-8);
      }
    }
  }
}

TEST_CASE("press_mse: equals brute-force leave-one-out retraining") {
  Rng rng(32);
  Matrix h = oracle::random_matrix(20, 4, rng);
  Matrix t = random_targets(20, 2, rng);
  double lambda = std::exp(-3.0);
  double want = oracle::loo_mse(h, t, lambda);
  CHECK(press_mse(h, t, lambda, PressPath::gram_eigen) == doctest::Approx(want).epsilon(1e-8));
  CHECK(press_mse(h, t, lambda, PressPath::hessenberg) == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("press_mse: both paths agree across shapes and lambdas") {
  Rng rng(33);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{10, 3},
                      {15, 15},
                      {9, 25}}) {
    Matrix h = oracle::random_matrix(n, m, rng);
    Matrix t = random_targets(n, 1, rng);
    for (double lambda : {std::exp(-12.0), std::exp(-6.0), std::exp(-1.0), 1.0}) {
      double a = press_mse(h, t, lambda, PressPath::gram_eigen);
      double b = press_mse(h, t, lambda, PressPath::hessenberg);
      CHECK(a == doctest::Approx(b).epsilon(1e-8));
      CHECK(a == doctest::Approx(oracle::loo_mse(h, t, lambda)).epsilon(1e-8));
    }
  }
}

TEST_CASE("press_mse: shrink-to-zero limit at huge lambda") {
  Rng rng(34);
  Matrix h = oracle::random_matrix(12, 4, rng);
  Matrix t = random_targets(12, 2, rng);
  double sum = 0.0;
  for (double v : t.data()) sum += v * v;
  double want = sum / (12.0 * 2.0);
  CHECK(press_mse(h, t, 1e12, PressPath::gram_eigen) == doctest::Approx(want).epsilon(1e-6));
  CHECK(press_mse(h, t, 1e12, PressPath::hessenberg) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("press_mse: interpolating leverage raises the degenerate error") {
  Rng rng(35);
  Matrix h(6, 6);
  for (std::size_t i = 0; i < 6; ++i) h(i, i) = 1.0 + 0.1 * rng.next_unit();
  Matrix t = random_targets(6, 1, rng);
  CHECK_THROWS_AS(press_mse(h, t, kLambdaFloor, PressPath::gram_eigen), DegenerateLeverageError);
  CHECK_THROWS_AS(press_mse(h, t, kLambdaFloor, PressPath::hessenberg), DegenerateLeverageError);
}

TEST_CASE("hat diagonal stays inside [0, 1] and symmetric across paths") {
  Rng rng(36);
  Matrix h = oracle::random_matrix(14, 6, rng);
  Matrix t = random_targets(14, 2, rng);
  for (double lambda : {1e-6, 1e-2, 1.0}) {
    RidgeFit fit = ridge_fit(h, t, lambda, RidgePath::hessenberg);
    for (double lev : fit.hat_diag) {
      CHECK(lev >= -1e-9);
      CHECK(lev <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("the full smoother matrix is symmetric with spectrum in [0, 1]") {
  Rng rng(47);
  Matrix h = oracle::random_matrix(12, 5, rng);
  for (double lambda : {1e-6, 1e-1, 2.0}) {
    // HAT = h (hᵀh + lambda I)⁻¹ hᵀ, assembled explicitly
    Matrix g = gram_columns(h);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
    Matrix hat = multiply(h, linalg::solve_symmetric(g, transpose(h)));
    for (std::size_t i = 0; i < hat.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(std::fabs(hat(i, j) - hat(j, i)) < 1e-9);
      }
    linalg::EigenFactors eig = linalg::gram_eigendecompose(hat);
    for (double v : eig.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("train: every variant separates two clusters perfectly") {
  Rng rng(37);
  Matrix x;
  std::vector<std::string> labels;
  separable_clusters(15, rng, x, labels);
  for (Variant variant : {Variant::elm, Variant::r_elm, Variant::hesselm, Variant::r_hesselm}) {
    TrainOptions opts;
    opts.variant = variant;
    opts.hidden = 20;
    opts.seed = 5;
    TrainResult result = train(x, labels, opts);
    Prediction pred = predict(result.model, x);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      CHECK(result.model.class_labels[pred.class_index[i]] == labels[i]);
    }
    bool regularized = variant == Variant::r_elm || variant == Variant::r_hesselm;
    CHECK(result.sweep.has_value() == regularized);
    if (!regularized) CHECK(result.model.lambda == 0.0);
  }
}

TEST_CASE("train: hessenberg route equals the eigen route at a forced lambda") {
  Rng rng(38);
  Matrix x = oracle::random_matrix(25, 3, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 25; ++i) labels.push_back(i % 2 ? "A" : "B");
  for (double lambda : {std::exp(-9.0), std::exp(-2.0)}) {
    TrainOptions opts;
    opts.hidden = 12;
    opts.seed = 9;
    opts.forced_lambda = lambda;
    opts.variant = Variant::r_hesselm;
    TrainResult hess = train(x, labels, opts);
    opts.variant = Variant::r_elm;
    TrainResult eig = train(x, labels, opts);
    CHECK(oracle::rel_error(hess.model.output_weights, eig.model.output_weights) < 1e-8);
    CHECK(hess.sweep->best_press == doctest::Approx(eig.sweep->best_press).epsilon(1e-6));
  }
}

TEST_CASE("train: r-hesselm decomposes exactly once for the whole grid") {
  Rng rng(39);
  Matrix x = oracle::random_matrix(30, 4, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 30; ++i) labels.push_back(i % 2 ? "A" : "B");
  TrainOptions opts;
  opts.variant = Variant::r_hesselm;
  opts.hidden = 10;
  std::uint64_t before = linalg::hessenberg_decompose_count();
  TrainResult result = train(x, labels, opts);
  CHECK(linalg::hessenberg_decompose_count() == before + 1);
  CHECK(result.sweep->candidates.size() == 20);
}

TEST_CASE("train: sweep candidates carry the grid and the argmin obeys ties") {
  Rng rng(41);
  Matrix x = oracle::random_matrix(24, 3, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 24; ++i) labels.push_back(i % 2 ? "A" : "B");
  TrainOptions opts;
  opts.variant = Variant::r_hesselm;
  opts.hidden = 8;
  TrainResult result = train(x, labels, opts);
  REQUIRE(result.sweep.has_value());
  double best = result.sweep->best_press;
  for (const auto& cand : result.sweep->candidates) {
    CHECK(cand.press >= best);
    if (cand.press == best) CHECK(cand.lambda <= result.sweep->best_lambda);
  }
  CHECK(result.model.lambda == result.sweep->best_lambda);
}

TEST_CASE("train: PRESS at every grid point equals explicit leave-one-out") {
  Rng rng(42);
  Matrix x = oracle::random_matrix(30, 5, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 30; ++i) labels.push_back(i % 2 ? "A" : "B");
  TrainOptions opts;
  opts.variant = Variant::r_hesselm;
  opts.hidden = 7;
  opts.seed = 3;
  opts.lambda_grid = {std::exp(-8.0), std::exp(-4.0), std::exp(-1.0)};
  TrainResult result = train(x, labels, opts);

  HiddenLayer layer = init_hidden(5, 7, 3);
  Matrix h = hidden_output(x, layer, Activation::sigmoid);
  Matrix t = encode_targets(labels, result.model.class_labels);
  REQUIRE(result.sweep->candidates.size() == 3);
  for (const auto& cand : result.sweep->candidates) {
    CHECK(cand.press == doctest::Approx(oracle::loo_mse(h, t, cand.lambda)).epsilon(1e-8));
  }
}

TEST_CASE("train: validation and degenerate paths") {
  Matrix x = Matrix::from_rows({{1.0, 2.0}});
  CHECK_THROWS_AS(train(x, {"A"}, TrainOptions{}), ValidationError);

  Matrix x2 = Matrix::from_rows({{1.0}, {2.0}});
  CHECK_THROWS_AS(train(x2, {"A", "A"}, TrainOptions{}), ValidationError);
  CHECK_THROWS_AS(train(x2, {"A"}, TrainOptions{}), DimensionError);

  TrainOptions empty_grid;
  empty_grid.variant = Variant::r_elm;
  empty_grid.lambda_grid = {};  // falls back to the default grid
  Rng rng(43);
  Matrix x3 = oracle::random_matrix(10, 2, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 10; ++i) labels.push_back(i % 2 ? "A" : "B");
  CHECK_NOTHROW(train(x3, labels, empty_grid));
}

TEST_CASE("train: warns when hidden count reaches the sample count") {
  WarningCapture capture;
  Rng rng(44);
  Matrix x = oracle::random_matrix(8, 2, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 8; ++i) labels.push_back(i % 2 ? "A" : "B");
  TrainOptions opts;
  opts.hidden = 16;
  opts.variant = Variant::r_hesselm;
  train(x, labels, opts);
  bool warned = false;
  for (const auto& line : capture.lines) {
    if (line.find("hidden neuron count") != std::string::npos) warned = true;
  }
  CHECK(warned);
}

TEST_CASE("predict: argmax with deterministic tie-break") {
  ElmModel model;
  model.class_labels = {"CHF", "NORMAL"};
  model.hidden.weights = Matrix::from_rows({{1.0}});
  model.hidden.biases = {0.0};
  model.activation = Activation::tanh;
  model.output_weights = Matrix::from_rows({{0.0, 0.0}});
  Matrix x(1, 1);  // tanh(0) = 0 -> scores exactly tied at zero
  Prediction pred = predict(model, x);
  CHECK(pred.class_index[0] == 0);

  model.output_weights = Matrix::from_rows({{0.9, -0.8}});
  x(0, 0) = 5.0;
  pred = predict(model, x);
  CHECK(pred.class_index[0] == 0);
  CHECK(pred.scores(0, 0) > pred.scores(0, 1));

  CHECK_THROWS_AS(predict(model, Matrix(1, 3)), DimensionError);
}

TEST_CASE("model persistence: bit-exact round trip") {
  Rng rng(45);
  Matrix x;
  std::vector<std::string> labels;
  separable_clusters(10, rng, x, labels);
  TrainOptions opts;
  opts.variant = Variant::r_hesselm;
  opts.hidden = 9;
  TrainResult result = train(x, labels, opts);
  result.model.extractor = features::FeatureExtractor{
      {features::PartitionKind::circled, 2, 1.5, features::Aggregation::count},
      {{-1.0, -2.0}, {1.0, 2.0}}};

  std::string path = "/tmp/hesselm_model_test.txt";
  save_model(result.model, path);
  ElmModel back = load_model(path);
  CHECK(back.hidden.weights == result.model.hidden.weights);
  CHECK(back.hidden.biases == result.model.hidden.biases);
  CHECK(back.output_weights == result.model.output_weights);
  CHECK(back.lambda == result.model.lambda);
  CHECK(back.seed == result.model.seed);
  CHECK(back.class_labels == result.model.class_labels);
  CHECK(back.variant == result.model.variant);
  REQUIRE(back.extractor.has_value());
  CHECK(back.extractor->spec.bound == result.model.extractor->spec.bound);

  Matrix probe = oracle::random_matrix(5, 2, rng);
  Prediction a = predict(result.model, probe);
  Prediction b = predict(back, probe);
  CHECK(a.scores == b.scores);

  // identical bytes when saved again
  save_model(back, path + ".2");
  CHECK(textio::read_text_file(path) == textio::read_text_file(path + ".2"));
}

TEST_CASE("model persistence: truncation, corruption, and version checks") {
  Rng rng(46);
  Matrix x;
  std::vector<std::string> labels;
  separable_clusters(5, rng, x, labels);
  TrainOptions opts;
  opts.hidden = 4;
  TrainResult result = train(x, labels, opts);
  std::string path = "/tmp/hesselm_model_test2.txt";
  save_model(result.model, path);

  std::string full = textio::read_text_file(path);
  textio::write_text_file(path + ".trunc", full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(load_model(path + ".trunc"), ParseError);

  std::string corrupted = full;
  corrupted.replace(corrupted.find("sigmoid"), 7, "sigmoig");
  textio::write_text_file(path + ".bad", corrupted);
  CHECK_THROWS_AS(load_model(path + ".bad"), ParseError);

  std::string newer = full;
  newer.replace(newer.find("hesselm model 1"), 15, "hesselm model 2");
  textio::write_text_file(path + ".v2", newer);
  CHECK_THROWS_AS(load_model(path + ".v2"), VersionError);

  CHECK_THROWS_AS(load_model("/tmp/does_not_exist_hesselm.txt"), IoError);
}

TEST_CASE("default lambda grid spans e^-20 .. e^-1") {
  std::vector<double> grid = default_lambda_grid();
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(std::exp(-20.0)));
  CHECK(grid.back() == doctest::Approx(std::exp(-1.0)));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(grid[i] < grid[i + 1]);
}
