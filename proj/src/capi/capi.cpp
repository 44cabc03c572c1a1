#include "hesselm/hesselm.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/elm.hpp"
#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/log.hpp"
#include "core/pipeline.hpp"

struct hesselm_config {
  hesselm::Config impl;
};

struct hesselm_model {
  hesselm::elm::ElmModel impl;
};

namespace {

thread_local std::string t_last_error;

hesselm_status map_code(hesselm::ErrorCode code) {
  using hesselm::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return HESSELM_ERROR_INVALID_ARGUMENT;
    case ErrorCode::dimension: return HESSELM_ERROR_DIMENSION;
    case ErrorCode::singular: return HESSELM_ERROR_SINGULAR;
    case ErrorCode::convergence: return HESSELM_ERROR_CONVERGENCE;
    case ErrorCode::parse: return HESSELM_ERROR_PARSE;
    case ErrorCode::io: return HESSELM_ERROR_IO;
    case ErrorCode::training: return HESSELM_ERROR_TRAINING;
    case ErrorCode::version: return HESSELM_ERROR_VERSION;
    case ErrorCode::internal: return HESSELM_ERROR_INTERNAL;
  }
  return HESSELM_ERROR_INTERNAL;
}

template <typename Fn>
hesselm_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return HESSELM_OK;
  } catch (const hesselm::Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return HESSELM_ERROR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return HESSELM_ERROR_INTERNAL;
  }
}

hesselm_status fail_invalid(const char* message) {
  t_last_error = message;
  return HESSELM_ERROR_INVALID_ARGUMENT;
}

hesselm_status copy_string(const std::string& value, char* buffer, size_t buffer_size) {
  if (buffer == nullptr || buffer_size == 0) {
    return fail_invalid("output buffer is null or empty");
  }
  if (value.size() + 1 > buffer_size) {
    t_last_error = "buffer of " + std::to_string(buffer_size) + " bytes cannot hold " +
                   std::to_string(value.size() + 1);
    return HESSELM_ERROR_INVALID_ARGUMENT;
  }
  std::memcpy(buffer, value.c_str(), value.size() + 1);
  return HESSELM_OK;
}

}  // namespace

extern "C" {

const char* hesselm_version(void) { return "1.0.0"; }

const char* hesselm_status_name(hesselm_status status) {
  switch (status) {
    case HESSELM_OK: return "ok";
    case HESSELM_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case HESSELM_ERROR_DIMENSION: return "dimension";
    case HESSELM_ERROR_SINGULAR: return "singular";
    case HESSELM_ERROR_CONVERGENCE: return "convergence";
    case HESSELM_ERROR_PARSE: return "parse";
    case HESSELM_ERROR_IO: return "io";
    case HESSELM_ERROR_TRAINING: return "training";
    case HESSELM_ERROR_VERSION: return "version";
    case HESSELM_ERROR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hesselm_last_error(void) { return t_last_error.c_str(); }

void hesselm_set_log_callback(hesselm_log_callback callback, void* user_data) {
  if (callback == nullptr) {
    hesselm::set_log_handler(nullptr);
    return;
  }
  hesselm::set_log_handler(
      [callback, user_data](const std::string& line) { callback(line.c_str(), user_data); });
}

hesselm_status hesselm_config_create(hesselm_config** out_config) {
  if (out_config == nullptr) return fail_invalid("out_config is null");
  return guarded([&] { *out_config = new hesselm_config{}; });
}

hesselm_status hesselm_config_open(const char* path, hesselm_config** out_config) {
  if (path == nullptr || out_config == nullptr) return fail_invalid("path or out_config is null");
  return guarded([&] { *out_config = new hesselm_config{hesselm::Config::load(path)}; });
}

hesselm_status hesselm_config_set(hesselm_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    return fail_invalid("config, key, or value is null");
  }
  return guarded([&] { config->impl.set(key, value); });
}

hesselm_status hesselm_config_get(const hesselm_config* config, const char* key, char* buffer,
                                  size_t buffer_size) {
  if (config == nullptr || key == nullptr) return fail_invalid("config or key is null");
  std::string value;
  hesselm_status status = guarded([&] { value = config->impl.get(key); });
  if (status != HESSELM_OK) return status;
  return copy_string(value, buffer, buffer_size);
}

hesselm_status hesselm_config_save(const hesselm_config* config, const char* path) {
  if (config == nullptr || path == nullptr) return fail_invalid("config or path is null");
  return guarded([&] { config->impl.save(path); });
}

void hesselm_config_free(hesselm_config* config) { delete config; }

size_t hesselm_config_key_count(void) { return hesselm::Config::keys().size(); }

const char* hesselm_config_key_name(size_t index) {
  const auto& keys = hesselm::Config::keys();
  return index < keys.size() ? keys[index].name : nullptr;
}

const char* hesselm_config_key_default(size_t index) {
  const auto& keys = hesselm::Config::keys();
  return index < keys.size() ? keys[index].default_value : nullptr;
}

const char* hesselm_config_key_help(size_t index) {
  const auto& keys = hesselm::Config::keys();
  return index < keys.size() ? keys[index].help : nullptr;
}

#define HESSELM_DEFINE_RUN(name)                                             \
  hesselm_status hesselm_run_##name(const hesselm_config* config) {          \
    if (config == nullptr) return fail_invalid("config is null");            \
    return guarded([&] { hesselm::pipeline::run_##name(config->impl); });    \
  }

HESSELM_DEFINE_RUN(synth)
HESSELM_DEFINE_RUN(preprocess)
HESSELM_DEFINE_RUN(features)
HESSELM_DEFINE_RUN(train)
HESSELM_DEFINE_RUN(evaluate)
HESSELM_DEFINE_RUN(sweep)
HESSELM_DEFINE_RUN(pipeline)

#undef HESSELM_DEFINE_RUN

hesselm_status hesselm_model_open(const char* path, hesselm_model** out_model) {
  if (path == nullptr || out_model == nullptr) return fail_invalid("path or out_model is null");
  return guarded([&] { *out_model = new hesselm_model{hesselm::elm::load_model(path)}; });
}

hesselm_status hesselm_model_save(const hesselm_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return fail_invalid("model or path is null");
  return guarded([&] { hesselm::elm::save_model(model->impl, path); });
}

void hesselm_model_free(hesselm_model* model) { delete model; }

size_t hesselm_model_feature_count(const hesselm_model* model) {
  return model == nullptr ? 0 : model->impl.feature_count();
}

size_t hesselm_model_class_count(const hesselm_model* model) {
  return model == nullptr ? 0 : model->impl.class_count();
}

hesselm_status hesselm_model_class_label(const hesselm_model* model, size_t index, char* buffer,
                                         size_t buffer_size) {
  if (model == nullptr) return fail_invalid("model is null");
  if (index >= model->impl.class_labels.size()) return fail_invalid("class index out of range");
  return copy_string(model->impl.class_labels[index], buffer, buffer_size);
}

double hesselm_model_lambda(const hesselm_model* model) {
  return model == nullptr ? 0.0 : model->impl.lambda;
}

hesselm_status hesselm_model_predict(const hesselm_model* model, const double* features,
                                     size_t n_rows, size_t n_features, double* out_scores,
                                     size_t* out_class_index) {
  if (model == nullptr || features == nullptr) return fail_invalid("model or features is null");
  if (n_rows == 0) return fail_invalid("n_rows is zero");
  return guarded([&] {
    hesselm::Matrix x(n_rows, n_features);
    if (model->impl.extractor) {
      const auto& normalizer = model->impl.extractor->normalizer;
      for (size_t i = 0; i < n_rows; ++i) {
        auto row = hesselm::features::apply_normalizer(
            normalizer, std::span<const double>(features + i * n_features, n_features));
        std::copy(row.begin(), row.end(), &x(i, 0));
      }
    } else {
      std::copy(features, features + n_rows * n_features, x.data().begin());
    }
    hesselm::elm::Prediction pred = hesselm::elm::predict(model->impl, x);
    if (out_scores != nullptr) {
      std::copy(pred.scores.data().begin(), pred.scores.data().end(), out_scores);
    }
    if (out_class_index != nullptr) {
      std::copy(pred.class_index.begin(), pred.class_index.end(), out_class_index);
    }
  });
}

hesselm_status hesselm_model_predict_segment(const hesselm_model* model, const double* samples,
                                             size_t n_samples, double* out_scores,
                                             size_t* out_class_index) {
  if (model == nullptr || samples == nullptr) return fail_invalid("model or samples is null");
  return guarded([&] {
    if (!model->impl.extractor) {
      throw hesselm::ValidationError(
          "model was saved without a feature extractor; segment prediction needs one");
    }
    auto points =
        hesselm::features::sodp(std::span<const double>(samples, n_samples));
    auto row = model->impl.extractor->transform(points);
    hesselm::Matrix x(1, row.size());
    std::copy(row.begin(), row.end(), &x(0, 0));
    hesselm::elm::Prediction pred = hesselm::elm::predict(model->impl, x);
    if (out_scores != nullptr) {
      std::copy(pred.scores.data().begin(), pred.scores.data().end(), out_scores);
    }
    if (out_class_index != nullptr) *out_class_index = pred.class_index[0];
  });
}

}  // extern "C"
