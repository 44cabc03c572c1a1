#include "core/elm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace hesselm::elm {

namespace {

double apply_activation(double z, Activation a) {
  return a == Activation::sigmoid ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
}

// Largest diagonal entry of hhᵀ (row route) or hᵀh (column route); the
// reference scale for the numerical floor shift.
double gram_scale(const Matrix& h, bool rows) {
  double scale = 0.0;
  if (rows) {
    for (std::size_t i = 0; i < h.rows(); ++i) {
      double s = 0.0;
      for (double v : h.row(i)) s += v * v;
      scale = std::max(scale, s);
    }
  } else {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < h.rows(); ++i) s += h(i, j) * h(i, j);
      scale = std::max(scale, s);
    }
  }
  return scale;
}

// One iterative-refinement pass with an extended-precision residual; the
// leverage diagonals are read off solves against systems conditioned like
// ‖gram‖/lambda, where a plain double solve is not quite enough.
void refine_solution(const Matrix& a, const Matrix& b, Matrix& x) {
  Matrix r(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double acc = b(i, j);
      for (std::size_t k = 0; k < a.cols(); ++k) {
        acc -= static_cast<long double>(a(i, k)) * x(k, j);
      }
      r(i, j) = static_cast<double>(acc);
    }
  }
  Matrix dx = linalg::solve_symmetric(a, r);
  for (std::size_t i = 0; i < x.data().size(); ++i) x.data()[i] += dx.data()[i];
}

struct PressEval {
  double press = 0.0;
  bool degenerate = false;
  double max_leverage = 0.0;
};

// Accumulates the PRESS mean from per-sample leave-one-out residuals given as
// numerator/denominator pairs whose common factor of lambda has already been
// cancelled; this keeps the value exact even when leverages approach 1.
PressEval press_from_ratio(const Matrix& numerator, const std::vector<double>& denominator,
                           double lambda) {
  PressEval out;
  double min_scale = 1.0;
  for (double v : denominator) min_scale = std::min(min_scale, lambda * v);
  out.max_leverage = 1.0 - min_scale;
  if (out.max_leverage >= kLeverageLimit) {
    out.degenerate = true;
    return out;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < numerator.rows(); ++j) {
    for (std::size_t c = 0; c < numerator.cols(); ++c) {
      double r = numerator(j, c) / denominator[j];
      sum += r * r;
    }
  }
  out.press = sum / (static_cast<double>(numerator.rows()) * static_cast<double>(numerator.cols()));
  return out;
}

PressEval press_from_residuals(const Matrix& fitted, const Matrix& t,
                               const std::vector<double>& one_minus_hat) {
  PressEval out;
  double min_scale = 1.0;
  for (double s : one_minus_hat) min_scale = std::min(min_scale, s);
  out.max_leverage = 1.0 - min_scale;
  if (out.max_leverage >= kLeverageLimit) {
    out.degenerate = true;
    return out;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < t.rows(); ++j) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      double r = (fitted(j, c) - t(j, c)) / one_minus_hat[j];
      sum += r * r;
    }
  }
  out.press = sum / (static_cast<double>(t.rows()) * static_cast<double>(t.cols()));
  return out;
}

// Eigendecomposition route. For m < N the factors come from hᵀh (the squared
// singular values of h); otherwise from hhᵀ, where the resolvent form stays
// stable near interpolation. Factored once, evaluated at any lambda.
class GramEigenPress {
public:
  GramEigenPress(const Matrix& h, const Matrix& t) : h_(&h), t_(&t) {
    via_rows_ = h.cols() >= h.rows();
    auto eig = linalg::gram_eigendecompose(via_rows_ ? gram_rows(h) : gram_columns(h));
    d_ = std::move(eig.values);
    vectors_ = std::move(eig.vectors);
    z_ = via_rows_ ? vectors_ : multiply(h, vectors_);
    p_ = multiply_at_b(z_, t);
  }

  // (hhᵀ+lambda I)⁻¹ diagonal; rows route only
  std::vector<double> resolvent_diag(double lambda) const {
    std::size_t n = t_->rows();
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double* zj = &z_(j, 0);
      double s = 0.0;
      for (std::size_t k = 0; k < d_.size(); ++k) s += zj[k] * zj[k] / (d_[k] + lambda);
      v[j] = s;
    }
    return v;
  }

  // (hhᵀ+lambda I)⁻¹ t; rows route only
  Matrix resolvent_targets(double lambda) const {
    Matrix scaled = p_;
    for (std::size_t k = 0; k < scaled.rows(); ++k) {
      for (std::size_t c = 0; c < scaled.cols(); ++c) scaled(k, c) /= d_[k] + lambda;
    }
    return multiply(z_, scaled);
  }

  std::vector<double> hat_diag(double lambda) const {
    if (via_rows_) {
      std::vector<double> v = resolvent_diag(lambda);
      for (double& x : v) x = 1.0 - lambda * x;
      return v;
    }
    std::size_t n = t_->rows();
    std::vector<double> hat(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double* zj = &z_(j, 0);
      double s = 0.0;
      for (std::size_t k = 0; k < d_.size(); ++k) s += zj[k] * zj[k] / (d_[k] + lambda);
      hat[j] = s;
    }
    return hat;
  }

  PressEval eval(double lambda) const {
    if (via_rows_) {
      return press_from_ratio(resolvent_targets(lambda), resolvent_diag(lambda), lambda);
    }
    Matrix scaled = p_;
    for (std::size_t k = 0; k < scaled.rows(); ++k) {
      for (std::size_t c = 0; c < scaled.cols(); ++c) scaled(k, c) /= d_[k] + lambda;
    }
    Matrix fitted = multiply(z_, scaled);
    std::vector<double> hat = hat_diag(lambda);
    std::vector<double> s(hat.size());
    for (std::size_t j = 0; j < hat.size(); ++j) s[j] = 1.0 - hat[j];
    return press_from_residuals(fitted, *t_, s);
  }

  Matrix weights(double lambda) const {
    Matrix scaled = p_;
    for (std::size_t k = 0; k < scaled.rows(); ++k) {
      double factor = 1.0 / (d_[k] + lambda);
      for (std::size_t c = 0; c < scaled.cols(); ++c) scaled(k, c) *= factor;
    }
    Matrix inner = multiply(vectors_, scaled);
    return via_rows_ ? multiply_at_b(*h_, inner) : inner;
  }

private:
  const Matrix* h_;
  const Matrix* t_;
  bool via_rows_ = false;
  std::vector<double> d_;
  Matrix vectors_;
  Matrix z_;  // rows give per-sample coordinates in the eigenbasis
  Matrix p_;
};

// Hessenberg route: hhᵀ = q·u·qᵀ decomposed once; every lambda reuses q and
// the tridiagonal bands of u. With the resolvent M = q(u+lambda I)⁻¹qᵀ,
// HAT = I - lambda·M, so leverages and leave-one-out residuals come out of M
// directly, without subtracting nearly equal quantities.
class HessenbergPress {
public:
  HessenbergPress(const Matrix& h, const Matrix& t)
      : h_(&h), t_(&t), factors_(linalg::hessenberg_decompose(gram_rows(h))) {
    bands_ = linalg::tridiagonal_bands(factors_.u);
    qt_t_ = multiply_at_b(factors_.q, t);
    qt_ = transpose(factors_.q);
  }

  std::vector<double> resolvent_diag(double lambda) const {
    linalg::TridiagonalFactor factor(bands_, lambda);
    std::size_t n = t_->rows();
    // diag(q (u+lambda I)⁻¹ qᵀ) from one batched solve against qᵀ
    Matrix y = factor.solve_columns(qt_);
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double* qk = &qt_(k, 0);
      const double* yk = &y(k, 0);
      for (std::size_t j = 0; j < n; ++j) v[j] += qk[j] * yk[j];
    }
    return v;
  }

  Matrix resolvent_targets(double lambda) const {
    linalg::TridiagonalFactor factor(bands_, lambda);
    return multiply(factors_.q, factor.solve_columns(qt_t_));
  }

  std::vector<double> hat_diag(double lambda) const {
    std::vector<double> v = resolvent_diag(lambda);
    for (double& x : v) x = 1.0 - lambda * x;
    return v;
  }

  PressEval eval(double lambda) const {
    return press_from_ratio(resolvent_targets(lambda), resolvent_diag(lambda), lambda);
  }

  Matrix weights(double lambda) const {
    return multiply_at_b(*h_, resolvent_targets(lambda));
  }

  const linalg::HessenbergFactors& factors() const { return factors_; }

private:
  const Matrix* h_;
  const Matrix* t_;
  linalg::HessenbergFactors factors_;
  linalg::TridiagonalBands bands_;
  Matrix qt_t_;
  Matrix qt_;
};

void check_design(const Matrix& h, const Matrix& t) {
  if (h.rows() != t.rows()) {
    throw DimensionError("design has " + std::to_string(h.rows()) + " rows, targets " +
                         std::to_string(t.rows()));
  }
  if (h.rows() == 0) throw ValidationError("empty design matrix");
}

// Candidate selection: minimum PRESS, ties toward the larger lambda.
struct SweepOutcome {
  PressSweepResult sweep;
  double chosen;
};

template <typename Engine>
SweepOutcome run_sweep(const Engine& engine, const std::vector<double>& grid, int threads) {
  std::vector<PressEval> evals(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { evals[i] = engine.eval(grid[i]); });

  SweepOutcome out;
  bool have_best = false;
  double best_press = 0.0, best_lambda = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (evals[i].degenerate) {
      log_warning("lambda " + textio::format_double(grid[i]) + " excluded: leverage " +
                  textio::format_double(evals[i].max_leverage) + " reaches interpolation");
      continue;
    }
    out.sweep.candidates.push_back({grid[i], evals[i].press});
    if (!have_best || evals[i].press < best_press ||
        (evals[i].press == best_press && grid[i] > best_lambda)) {
      have_best = true;
      best_press = evals[i].press;
      best_lambda = grid[i];
    }
  }
  if (!have_best) {
    throw TrainingError("every lambda candidate was excluded by degenerate leverage");
  }
  out.sweep.best_lambda = best_lambda;
  out.sweep.best_press = best_press;
  out.chosen = best_lambda;
  return out;
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw ValidationError("unknown activation '" + name + "' (expected sigmoid or tanh)");
}

Variant parse_variant(const std::string& name) {
  if (name == "elm") return Variant::elm;
  if (name == "r-elm") return Variant::r_elm;
  if (name == "hesselm") return Variant::hesselm;
  if (name == "r-hesselm") return Variant::r_hesselm;
  throw ValidationError("unknown variant '" + name +
                        "' (expected elm, r-elm, hesselm, or r-hesselm)");
}

std::string to_string(Activation a) { return a == Activation::sigmoid ? "sigmoid" : "tanh"; }

std::string to_string(Variant v) {
  switch (v) {
    case Variant::elm: return "elm";
    case Variant::r_elm: return "r-elm";
    case Variant::hesselm: return "hesselm";
    case Variant::r_hesselm: return "r-hesselm";
  }
  return "?";
}

HiddenLayer init_hidden(std::size_t n_features, std::size_t hidden, std::uint64_t seed) {
  if (hidden < 1) throw ValidationError("init_hidden: need at least one hidden neuron");
  if (n_features < 1) throw ValidationError("init_hidden: need at least one feature");
  Rng rng(seed);
  HiddenLayer layer;
  layer.weights = Matrix(n_features, hidden);
  for (double& v : layer.weights.data()) v = rng.next_symmetric();
  layer.biases.resize(hidden);
  for (double& b : layer.biases) b = rng.next_symmetric();
  return layer;
}

Matrix hidden_output(const Matrix& x, const HiddenLayer& layer, Activation activation) {
  if (x.cols() != layer.weights.rows()) {
    throw DimensionError("hidden_output: input has " + std::to_string(x.cols()) +
                         " features, layer expects " + std::to_string(layer.weights.rows()));
  }
  Matrix h = multiply(x, layer.weights);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    double* row = &h(i, 0);
    for (std::size_t k = 0; k < h.cols(); ++k) {
      row[k] = apply_activation(row[k] + layer.biases[k], activation);
    }
  }
  return h;
}

Matrix encode_targets(const std::vector<std::string>& labels,
                      const std::vector<std::string>& class_labels) {
  Matrix t(labels.size(), class_labels.size(), -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(class_labels.begin(), class_labels.end(), labels[i]);
    if (it == class_labels.end()) {
      throw ValidationError("encode_targets: label '" + labels[i] + "' is not a known class");
    }
    t(i, static_cast<std::size_t>(it - class_labels.begin())) = 1.0;
  }
  return t;
}

RidgeFit ridge_fit(const Matrix& h, const Matrix& t, double lambda, RidgePath path) {
  check_design(h, t);
  if (lambda < 0.0) throw ValidationError("ridge_fit: lambda must be nonnegative");
  RidgeFit fit;
  switch (path) {
    case RidgePath::direct: {
      fit.weights = linalg::ridge_solve_direct(h, t, lambda);
      std::size_t n = h.rows();
      fit.hat_diag.assign(n, 0.0);
      if (h.cols() <= n) {
        Matrix g = gram_columns(h);
        for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
        Matrix ht = transpose(h);
        Matrix k = linalg::solve_symmetric(g, ht);
        refine_solution(g, ht, k);
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < h.cols(); ++i) s += h(j, i) * k(i, j);
          fit.hat_diag[j] = s;
        }
      } else {
        Matrix g = gram_rows(h);
        Matrix shifted = g;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) += lambda;
        Matrix s = linalg::solve_symmetric(shifted, g);
        refine_solution(shifted, g, s);
        for (std::size_t j = 0; j < n; ++j) fit.hat_diag[j] = s(j, j);
      }
      return fit;
    }
    case RidgePath::gram_eigen: {
      GramEigenPress engine(h, t);
      fit.weights = engine.weights(lambda);
      fit.hat_diag = engine.hat_diag(lambda);
      return fit;
    }
    case RidgePath::hessenberg: {
      HessenbergPress engine(h, t);
      fit.weights = engine.weights(lambda);
      fit.hat_diag = engine.hat_diag(lambda);
      return fit;
    }
  }
  throw ValidationError("ridge_fit: unknown path");
}

double press_mse(const Matrix& h, const Matrix& t, double lambda, PressPath path) {
  check_design(h, t);
  if (lambda < 0.0) throw ValidationError("press_mse: lambda must be nonnegative");
  PressEval eval = path == PressPath::gram_eigen ? GramEigenPress(h, t).eval(lambda)
                                                 : HessenbergPress(h, t).eval(lambda);
  if (eval.degenerate) {
    throw DegenerateLeverageError("press_mse: leverage " + textio::format_double(eval.max_leverage) +
                                  " at lambda " + textio::format_double(lambda) +
                                  " leaves the leave-one-out residual undefined");
  }
  return eval.press;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -20; e <= -1; ++e) grid.push_back(std::exp(static_cast<double>(e)));
  return grid;
}

TrainResult train(const Matrix& x, const std::vector<std::string>& labels,
                  const TrainOptions& options) {
  if (x.rows() != labels.size()) {
    throw DimensionError("train: " + std::to_string(x.rows()) + " feature rows but " +
                         std::to_string(labels.size()) + " labels");
  }
  if (x.rows() < 2) throw ValidationError("train: need at least 2 samples");
  if (!x.all_finite()) throw ValidationError("train: features contain non-finite values");

  std::set<std::string> unique(labels.begin(), labels.end());
  std::vector<std::string> class_labels(unique.begin(), unique.end());
  if (class_labels.size() < 2) throw ValidationError("train: need at least 2 classes");

  if (options.hidden >= x.rows()) {
    log_warning("hidden neuron count " + std::to_string(options.hidden) +
                " is not below the sample count " + std::to_string(x.rows()) +
                "; the minimum-norm solve will be used");
  }

  bool regularized = options.variant == Variant::r_elm || options.variant == Variant::r_hesselm;
  std::vector<double> grid;
  if (options.forced_lambda) {
    if (*options.forced_lambda < 0.0) throw ValidationError("train: lambda must be nonnegative");
    grid = {*options.forced_lambda};
  } else if (regularized) {
    grid = options.lambda_grid.empty() ? default_lambda_grid() : options.lambda_grid;
    if (grid.empty()) throw ValidationError("train: empty lambda candidate set");
  }

  ElmModel model;
  model.variant = options.variant;
  model.activation = options.activation;
  model.seed = options.seed;
  model.class_labels = class_labels;
  model.hidden = init_hidden(x.cols(), options.hidden, options.seed);

  Matrix h = hidden_output(x, model.hidden, options.activation);
  Matrix t = encode_targets(labels, class_labels);

  TrainResult result;
  bool via_hessenberg =
      options.variant == Variant::hesselm || options.variant == Variant::r_hesselm;

  if (grid.empty()) {
    // unregularized variants: solve at the numerical floor (scaled with the
    // Gram magnitude so the shifted solve stays well-posed), report lambda 0
    if (via_hessenberg) {
      double floor = kLambdaFloor * std::max(1.0, gram_scale(h, true));
      auto factors = linalg::hessenberg_decompose(gram_rows(h));
      model.output_weights = multiply_at_b(h, linalg::shifted_hess_solve(factors, floor, t));
    } else {
      bool rows = h.cols() > h.rows();
      double floor = kLambdaFloor * std::max(1.0, gram_scale(h, rows));
      model.output_weights = linalg::ridge_solve_direct(h, t, floor);
    }
    model.lambda = 0.0;
  } else if (via_hessenberg) {
    HessenbergPress engine(h, t);
    SweepOutcome outcome = run_sweep(engine, grid, options.threads);
    model.output_weights = engine.weights(outcome.chosen);
    model.lambda = outcome.chosen;
    result.sweep = std::move(outcome.sweep);
  } else {
    GramEigenPress engine(h, t);
    SweepOutcome outcome = run_sweep(engine, grid, options.threads);
    model.output_weights = linalg::ridge_solve_direct(h, t, outcome.chosen);
    model.lambda = outcome.chosen;
    result.sweep = std::move(outcome.sweep);
  }

  result.model = std::move(model);
  return result;
}

Prediction predict(const ElmModel& model, const Matrix& x) {
  if (x.cols() != model.feature_count()) {
    throw DimensionError("predict: input has " + std::to_string(x.cols()) +
                         " features, model expects " + std::to_string(model.feature_count()));
  }
  Prediction out;
  out.scores = multiply(hidden_output(x, model.hidden, model.activation), model.output_weights);
  out.class_index.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < out.scores.cols(); ++c) {
      if (out.scores(i, c) > out.scores(i, best)) best = c;
    }
    out.class_index[i] = best;
  }
  return out;
}

namespace {

void write_matrix_block(std::string& out, const std::string& name, const Matrix& m) {
  out += name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += textio::join_doubles(m.row(i));
    out += '\n';
  }
}

Matrix read_matrix_block(textio::LineReader& reader, const std::string& name) {
  std::string header = reader.next(name);
  auto tokens = textio::split(header, ' ');
  if (tokens.size() != 3 || tokens[0] != name) {
    throw ParseError(reader.name() + ": expected '" + name + " <rows> <cols>', got '" + header +
                     "'");
  }
  auto rows = static_cast<std::size_t>(
      textio::parse_int_strict(tokens[1], reader.name() + ": " + name + " rows"));
  auto cols = static_cast<std::size_t>(
      textio::parse_int_strict(tokens[2], reader.name() + ": " + name + " cols"));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto values = textio::parse_double_list(reader.next(name + " row"), cols,
                                            reader.name() + ": " + name);
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = values[j];
  }
  return m;
}

}  // namespace

void save_model(const ElmModel& model, const std::string& path) {
  std::string out = "hesselm model 1\n";
  out += "variant = " + to_string(model.variant) + "\n";
  out += "activation = " + to_string(model.activation) + "\n";
  out += "lambda = " + textio::format_double(model.lambda) + "\n";
  out += "seed = " + std::to_string(model.seed) + "\n";
  out += "classes = ";
  for (std::size_t i = 0; i < model.class_labels.size(); ++i) {
    if (i != 0) out += ',';
    out += model.class_labels[i];
  }
  out += '\n';
  write_matrix_block(out, "input_weights", model.hidden.weights);
  out += "biases " + std::to_string(model.hidden.biases.size()) + "\n";
  out += textio::join_doubles(model.hidden.biases) + "\n";
  write_matrix_block(out, "output_weights", model.output_weights);
  out += std::string("extractor ") + (model.extractor ? "1" : "0") + "\n";
  if (model.extractor) features::write_extractor_block(out, *model.extractor);
  out += "end\n";
  textio::write_text_file(path, out);
}

ElmModel load_model(const std::string& path) {
  auto reader = textio::LineReader::from_file(path);
  std::string header = reader.next("header");
  auto tokens = textio::split(header, ' ');
  if (tokens.size() != 3 || tokens[0] != "hesselm" || tokens[1] != "model") {
    throw ParseError(path + ": not a model file");
  }
  long long version = textio::parse_int_strict(tokens[2], path + ": version");
  if (version > 1) {
    throw VersionError(path + ": model format version " + std::to_string(version) +
                       " is newer than this toolkit supports (1)");
  }

  ElmModel model;
  try {
    model.variant = parse_variant(reader.expect_value("variant"));
    model.activation = parse_activation(reader.expect_value("activation"));
    model.lambda = textio::parse_double_strict(reader.expect_value("lambda"), path + ": lambda");
    model.seed = static_cast<std::uint64_t>(
        textio::parse_int_strict(reader.expect_value("seed"), path + ": seed"));
    model.class_labels = textio::split(reader.expect_value("classes"), ',');
    if (model.class_labels.size() < 2) throw ParseError(path + ": fewer than 2 classes");
    model.hidden.weights = read_matrix_block(reader, "input_weights");

    std::string bias_header = reader.next("biases");
    auto bias_tokens = textio::split(bias_header, ' ');
    if (bias_tokens.size() != 2 || bias_tokens[0] != "biases") {
      throw ParseError(path + ": expected 'biases <count>', got '" + bias_header + "'");
    }
    auto count = static_cast<std::size_t>(
        textio::parse_int_strict(bias_tokens[1], path + ": bias count"));
    model.hidden.biases =
        textio::parse_double_list(reader.next("bias values"), count, path + ": biases");

    model.output_weights = read_matrix_block(reader, "output_weights");

    std::string ext_header = reader.next("extractor");
    auto ext_tokens = textio::split(ext_header, ' ');
    if (ext_tokens.size() != 2 || ext_tokens[0] != "extractor" ||
        (ext_tokens[1] != "0" && ext_tokens[1] != "1")) {
      throw ParseError(path + ": expected 'extractor 0|1', got '" + ext_header + "'");
    }
    if (ext_tokens[1] == "1") model.extractor = features::read_extractor_block(reader);
    if (reader.next("end") != "end") throw ParseError(path + ": missing end marker");
  } catch (const ValidationError& err) {
    throw ParseError(path + ": " + err.what());
  }

  if (model.hidden.biases.size() != model.hidden.weights.cols() ||
      model.output_weights.rows() != model.hidden.weights.cols() ||
      model.output_weights.cols() != model.class_labels.size()) {
    throw ParseError(path + ": inconsistent layer dimensions");
  }
  if (!model.hidden.weights.all_finite() || !model.output_weights.all_finite()) {
    throw ParseError(path + ": model contains non-finite values");
  }
  if (model.extractor &&
      model.extractor->spec.feature_count() != model.hidden.weights.rows()) {
    throw ParseError(path + ": extractor feature count does not match the input layer");
  }
  return model;
}

}  // namespace hesselm::elm
