#include "core/config.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/elm.hpp"
#include "core/textio.hpp"

namespace hesselm {

namespace {

const std::vector<KeySpec> kKeys = {
    {"data.manifest", "", "dataset manifest CSV (path,label,sampling_rate_hz)"},
    {"data.output_dir", "out", "directory all artifacts are written to"},
    {"preprocess.w1_ms", "200", "first median filter window in milliseconds"},
    {"preprocess.w2_ms", "600", "second median filter window in milliseconds"},
    {"preprocess.f0_hz", "60", "notch centre frequency in Hz"},
    {"preprocess.q", "30", "notch quality factor"},
    {"preprocess.segment_seconds", "10", "segment length in seconds"},
    {"features.kind", "inclined", "partition kind: circled, squared, inclined, grid"},
    {"features.region_count", "0", "regions (grid: cells per axis); 0 = kind default"},
    {"features.aggregation", "probability", "region aggregation: count, probability, shannon"},
    {"model.variant", "r-hesselm", "classifier: elm, r-elm, hesselm, r-hesselm"},
    {"model.hidden", "50", "hidden neuron count"},
    {"model.activation", "sigmoid", "hidden activation: sigmoid, tanh"},
    {"model.lambda_exp_min", "-20", "smallest lambda exponent: grid spans e^min..e^max"},
    {"model.lambda_exp_max", "-1", "largest lambda exponent"},
    {"model.fixed_lambda", "", "force this lambda and skip selection (empty = select)"},
    {"model.seed", "1", "seed for the random hidden layer"},
    {"eval.folds", "5", "cross-validation fold count"},
    {"eval.positive_class", "CHF", "class reported as positive in the metrics"},
    {"eval.group_by_source", "false", "keep all segments of a source in one fold"},
    {"eval.seed", "1", "seed for the fold shuffle"},
    {"synth.enabled", "false", "generate the synthetic dataset in the pipeline command"},
    {"synth.records_per_class", "5", "synthetic records per class"},
    {"synth.segments_per_record", "40", "segments each synthetic record yields"},
    {"synth.sampling_rate_hz", "250", "synthetic sampling rate"},
    {"synth.seed", "7", "synthetic generator seed"},
    {"runtime.threads", "1", "worker thread cap (results do not depend on it)"},
};

bool is_known_key(const std::string& key) {
  for (const auto& spec : kKeys) {
    if (key == spec.name) return true;
  }
  return false;
}

double parse_double(const std::string& key, const std::string& value) {
  return textio::parse_double_strict(value, "config key " + key);
}

long long parse_int(const std::string& key, const std::string& value) {
  return textio::parse_int_strict(value, "config key " + key);
}

void check_positive(const std::string& key, double v) {
  if (v <= 0.0) throw ValidationError("config key " + key + " must be positive, got " +
                                      std::to_string(v));
}

// Eager validation so a bad config fails at load time, not mid-pipeline.
void validate_value(const std::string& key, const std::string& value) {
  if (key == "preprocess.w1_ms" || key == "preprocess.w2_ms" || key == "preprocess.f0_hz" ||
      key == "preprocess.q" || key == "preprocess.segment_seconds" ||
      key == "synth.sampling_rate_hz") {
    check_positive(key, parse_double(key, value));
  } else if (key == "features.kind") {
    features::parse_partition_kind(value);
  } else if (key == "features.aggregation") {
    features::parse_aggregation(value);
  } else if (key == "features.region_count") {
    long long v = parse_int(key, value);
    if (v != 0 && v < 2) throw ValidationError("config key " + key + " must be 0 or at least 2");
  } else if (key == "model.variant") {
    elm::parse_variant(value);
  } else if (key == "model.activation") {
    elm::parse_activation(value);
  } else if (key == "model.hidden" || key == "synth.records_per_class" ||
             key == "synth.segments_per_record" || key == "runtime.threads") {
    if (parse_int(key, value) < 1) {
      throw ValidationError("config key " + key + " must be at least 1");
    }
  } else if (key == "model.lambda_exp_min" || key == "model.lambda_exp_max") {
    parse_int(key, value);
  } else if (key == "model.fixed_lambda") {
    if (!value.empty() && parse_double(key, value) < 0.0) {
      throw ValidationError("config key " + key + " must be nonnegative");
    }
  } else if (key == "model.seed" || key == "eval.seed" || key == "synth.seed") {
    parse_int(key, value);
  } else if (key == "eval.folds") {
    if (parse_int(key, value) < 2) throw ValidationError("config key eval.folds must be at least 2");
  } else if (key == "eval.group_by_source" || key == "synth.enabled") {
    if (value != "true" && value != "false") {
      throw ValidationError("config key " + key + " must be true or false");
    }
  }
  // remaining keys are free-form strings
}

}  // namespace

Config::Config() {
  for (const auto& spec : kKeys) values_[spec.name] = spec.default_value;
}

const std::vector<KeySpec>& Config::keys() { return kKeys; }

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  Config config;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = textio::trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[' && text.back() == ']') {
      section = textio::trim(text.substr(1, text.size() - 2));
      continue;
    }
    std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + " line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = textio::trim(text.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      config.set(key, textio::trim(text.substr(eq + 1)));
    } catch (const Error& e) {
      throw ParseError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw ValidationError("unknown config key '" + key + "'");
  validate_value(key, value);
  values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get(key)); }

long long Config::get_int(const std::string& key) const { return parse_int(key, get(key)); }

bool Config::get_bool(const std::string& key) const { return get(key) == "true"; }

std::string Config::serialize() const {
  std::string out;
  std::string section;
  for (const auto& spec : kKeys) {
    std::string name = spec.name;
    std::size_t dot = name.find('.');
    std::string sec = name.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + values_.at(name) + "\n";
  }
  return out;
}

void Config::save(const std::string& path) const { textio::write_text_file(path, serialize()); }

}  // namespace hesselm
