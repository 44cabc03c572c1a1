#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/linalg.hpp"
#include "core/matrix.hpp"

namespace hesselm::elm {

enum class Activation { sigmoid, tanh };
enum class Variant { elm, r_elm, hesselm, r_hesselm };

Activation parse_activation(const std::string& name);
Variant parse_variant(const std::string& name);
std::string to_string(Activation a);
std::string to_string(Variant v);

// Numerical stabilizer used by the unregularized variants; reported as
// lambda = 0 in their outputs.
inline constexpr double kLambdaFloor = 1e-12;

// Leverages at or above this are treated as interpolation and excluded.
inline constexpr double kLeverageLimit = 1.0 - 1e-10;

struct HiddenLayer {
  Matrix weights;               // n_features × m
  std::vector<double> biases;   // m
};

// Weights and biases i.i.d. uniform on [-1, 1] from a seeded deterministic
// generator; identical seeds give identical layers.
HiddenLayer init_hidden(std::size_t n_features, std::size_t hidden, std::uint64_t seed);

Matrix hidden_output(const Matrix& x, const HiddenLayer& layer, Activation activation);

// ±1 one-hot rows: +1 for the true class, -1 elsewhere.
Matrix encode_targets(const std::vector<std::string>& labels,
                      const std::vector<std::string>& class_labels);

enum class RidgePath { direct, gram_eigen, hessenberg };

// Ridge solution together with the smoother (HAT) diagonal, computed along
// one of the three algebraically equivalent routes.
struct RidgeFit {
  Matrix weights;                // L × C
  std::vector<double> hat_diag;  // N leverages
};

RidgeFit ridge_fit(const Matrix& h, const Matrix& t, double lambda, RidgePath path);

enum class PressPath { gram_eigen, hessenberg };

// Closed-form leave-one-out mean squared error of the ridge smoother at the
// given lambda. Residuals are scaled per sample by 1/(1 - HAT_jj), squared,
// summed across outputs, and averaged over N·C.
double press_mse(const Matrix& h, const Matrix& t, double lambda, PressPath path);

struct PressCandidate {
  double lambda;
  double press;
};

struct PressSweepResult {
  std::vector<PressCandidate> candidates;
  double best_lambda = 0.0;
  double best_press = 0.0;
};

struct ElmModel {
  Variant variant = Variant::r_hesselm;
  Activation activation = Activation::sigmoid;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> class_labels;
  HiddenLayer hidden;
  Matrix output_weights;  // m × C
  std::optional<features::FeatureExtractor> extractor;

  std::size_t feature_count() const { return hidden.weights.rows(); }
  std::size_t class_count() const { return class_labels.size(); }
};

struct TrainOptions {
  Variant variant = Variant::r_hesselm;
  std::size_t hidden = 50;
  Activation activation = Activation::sigmoid;
  std::vector<double> lambda_grid;          // defaults to e^-20 .. e^-1
  std::optional<double> forced_lambda;      // evaluate only this lambda
  std::uint64_t seed = 1;
  int threads = 1;
};

// e^-20 .. e^-1, integer exponents ascending.
std::vector<double> default_lambda_grid();

struct TrainResult {
  ElmModel model;
  std::optional<PressSweepResult> sweep;
};

// Derives class labels from the data (sorted, unique), builds the hidden
// layer, and solves the output weights along the variant's route. The
// regularized variants pick lambda by minimum PRESS, ties broken toward the
// larger lambda; decomposition factors are computed once and reused across
// the whole candidate grid.
TrainResult train(const Matrix& x, const std::vector<std::string>& labels,
                  const TrainOptions& options);

struct Prediction {
  Matrix scores;                         // N × C
  std::vector<std::size_t> class_index;  // argmax, ties toward lower index
};

Prediction predict(const ElmModel& model, const Matrix& x);

void save_model(const ElmModel& model, const std::string& path);
ElmModel load_model(const std::string& path);

}  // namespace hesselm::elm
