#include "core/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "core/elm.hpp"
#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/log.hpp"
#include "core/parallel.hpp"
#include "core/synth.hpp"
#include "core/textio.hpp"

namespace fs = std::filesystem;

namespace hesselm::pipeline {

namespace {

struct ManifestRow {
  std::string path;  // resolved
  std::string label;
  double sampling_rate_hz;
};

void check_label(const std::string& label, const std::string& context) {
  if (label.empty()) throw ValidationError(context + ": empty label");
  for (char c : label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw ValidationError(context + ": label '" + label +
                            "' may only contain letters, digits, '-' and '_'");
    }
  }
}

fs::path prepare_output(const Config& config) {
  fs::path out = config.get("data.output_dir");
  fs::create_directories(out);
  config.save((out / "effective-config.ini").string());
  return out;
}

std::vector<ManifestRow> read_dataset_manifest(const std::string& path) {
  auto reader = textio::LineReader::from_file(path);
  std::string header = reader.next("manifest header");
  if (header != "path,label,sampling_rate_hz") {
    throw ParseError(path + ": expected header 'path,label,sampling_rate_hz', got '" + header +
                     "'");
  }
  fs::path base = fs::path(path).parent_path();
  std::vector<ManifestRow> rows;
  while (auto maybe_line = reader.try_next()) {
    const std::string& line = *maybe_line;
    auto fields = textio::split(line, ',');
    if (fields.size() != 3) {
      throw ParseError(path + ": malformed row '" + line + "'");
    }
    ManifestRow row;
    fs::path p = textio::trim(fields[0]);
    row.path = (p.is_absolute() ? p : base / p).string();
    row.label = textio::trim(fields[1]);
    check_label(row.label, path);
    row.sampling_rate_hz = textio::parse_double_strict(textio::trim(fields[2]),
                                                       path + ": sampling_rate_hz");
    if (row.sampling_rate_hz <= 0.0) {
      throw ValidationError(path + ": sampling rate must be positive");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path + ": no records");
  return rows;
}

void write_samples(const fs::path& path, std::span<const double> samples) {
  std::string out;
  out.reserve(samples.size() * 20);
  for (double v : samples) {
    out += textio::format_double(v);
    out += '\n';
  }
  textio::write_text_file(path.string(), out);
}

std::string resolve_manifest(const Config& config, const fs::path& out) {
  std::string manifest = config.get("data.manifest");
  if (manifest.empty() && config.get_bool("synth.enabled")) {
    manifest = (out / "synth" / "manifest.csv").string();
  }
  if (manifest.empty()) {
    throw ValidationError("no dataset manifest configured (set data.manifest or synth.enabled)");
  }
  return manifest;
}

std::string format_metric(const std::optional<double>& v) {
  return v ? textio::format_double(*v) : "NA";
}

std::string format_press(double press) {
  return std::isnan(press) ? "NA" : textio::format_double(press);
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string feature_column(features::PartitionKind kind, std::size_t index) {
  return features::to_string(kind) + "_" + std::to_string(index + 1);
}

struct FeatureTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t feature_count = 0;
};

FeatureTable read_features_csv(const std::string& path) {
  auto reader = textio::LineReader::from_file(path);
  std::string header = reader.next("feature header");
  auto columns = textio::split(header, ',');
  if (columns.size() < 2 || columns.back() != "label") {
    throw ParseError(path + ": expected feature columns followed by 'label'");
  }
  FeatureTable table;
  table.feature_count = columns.size() - 1;
  while (auto maybe_line = reader.try_next()) {
    const std::string& line = *maybe_line;
    auto fields = textio::split(line, ',');
    if (fields.size() != columns.size()) {
      throw ParseError(path + ": row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(columns.size()));
    }
    std::vector<double> row(table.feature_count);
    for (std::size_t j = 0; j < table.feature_count; ++j) {
      row[j] = textio::parse_double_strict(fields[j], path + ": feature value");
    }
    table.rows.push_back(std::move(row));
    table.labels.push_back(fields.back());
  }
  if (table.rows.empty()) throw ValidationError(path + ": no feature rows");
  return table;
}

elm::TrainOptions train_options_from(const Config& config) {
  elm::TrainOptions opts;
  opts.variant = elm::parse_variant(config.get("model.variant"));
  opts.hidden = static_cast<std::size_t>(config.get_int("model.hidden"));
  opts.activation = elm::parse_activation(config.get("model.activation"));
  opts.lambda_grid = lambda_grid_from(config);
  const std::string& fixed = config.get("model.fixed_lambda");
  if (!fixed.empty()) {
    opts.forced_lambda = textio::parse_double_strict(fixed, "model.fixed_lambda");
  }
  opts.seed = static_cast<std::uint64_t>(config.get_int("model.seed"));
  opts.threads = static_cast<int>(config.get_int("runtime.threads"));
  return opts;
}

}  // namespace

std::vector<double> lambda_grid_from(const Config& config) {
  long long lo = config.get_int("model.lambda_exp_min");
  long long hi = config.get_int("model.lambda_exp_max");
  if (lo > hi) {
    throw ValidationError("model.lambda_exp_min must not exceed model.lambda_exp_max");
  }
  std::vector<double> grid;
  for (long long e = lo; e <= hi; ++e) grid.push_back(std::exp(static_cast<double>(e)));
  return grid;
}

eval::EvalOptions eval_options_from(const Config& config) {
  eval::EvalOptions opts;
  opts.features.kind = features::parse_partition_kind(config.get("features.kind"));
  opts.features.region_count = static_cast<std::size_t>(config.get_int("features.region_count"));
  opts.features.aggregation = features::parse_aggregation(config.get("features.aggregation"));
  opts.train = train_options_from(config);
  opts.folds = static_cast<std::size_t>(config.get_int("eval.folds"));
  opts.seed = static_cast<std::uint64_t>(config.get_int("eval.seed"));
  opts.positive_class = config.get("eval.positive_class");
  opts.group_by_source = config.get_bool("eval.group_by_source");
  return opts;
}

std::vector<sig::Segment> load_segments(const std::string& segment_manifest) {
  auto reader = textio::LineReader::from_file(segment_manifest);
  std::string header = reader.next("segment manifest header");
  if (header != "path,label,source_id,start_index,sampling_rate_hz") {
    throw ParseError(segment_manifest + ": unexpected header '" + header + "'");
  }
  fs::path base = fs::path(segment_manifest).parent_path();
  std::vector<sig::Segment> segments;
  while (auto maybe_line = reader.try_next()) {
    const std::string& line = *maybe_line;
    auto fields = textio::split(line, ',');
    if (fields.size() != 5) throw ParseError(segment_manifest + ": malformed row '" + line + "'");
    fs::path p = fields[0];
    if (!p.is_absolute()) p = base / p;
    double rate = textio::parse_double_strict(fields[4], segment_manifest + ": rate");
    sig::SignalRecord rec = sig::load_signal(p.string(), rate, fields[1], fields[2]);
    sig::Segment seg;
    seg.samples = std::move(rec.samples);
    seg.label = fields[1];
    seg.source_id = fields[2];
    seg.start_index = static_cast<std::size_t>(
        textio::parse_int_strict(fields[3], segment_manifest + ": start_index"));
    segments.push_back(std::move(seg));
  }
  if (segments.empty()) throw ValidationError(segment_manifest + ": no segments");
  return segments;
}

void run_synth(const Config& config) {
  fs::path out = prepare_output(config);
  synth::SynthOptions opts;
  opts.records_per_class = static_cast<std::size_t>(config.get_int("synth.records_per_class"));
  opts.segments_per_record = static_cast<std::size_t>(config.get_int("synth.segments_per_record"));
  opts.sampling_rate_hz = config.get_double("synth.sampling_rate_hz");
  opts.segment_seconds = config.get_double("preprocess.segment_seconds");
  opts.seed = static_cast<std::uint64_t>(config.get_int("synth.seed"));

  fs::path synth_dir = out / "synth";
  fs::create_directories(synth_dir);
  std::vector<sig::SignalRecord> records = synth::synth_records(opts);
  std::string manifest = "path,label,sampling_rate_hz\n";
  for (const auto& rec : records) {
    std::string file = rec.source_id + ".txt";
    write_samples(synth_dir / file, rec.samples);
    manifest += file + "," + rec.label + "," + textio::format_double(rec.sampling_rate_hz) + "\n";
  }
  textio::write_text_file((synth_dir / "manifest.csv").string(), manifest);
  log_info("synth: wrote " + std::to_string(records.size()) + " records to " + synth_dir.string());
}

void run_preprocess(const Config& config) {
  fs::path out = prepare_output(config);
  std::string manifest_path = resolve_manifest(config, out);
  std::vector<ManifestRow> rows = read_dataset_manifest(manifest_path);

  std::string missing;
  for (const auto& row : rows) {
    if (!fs::exists(row.path)) missing += "\n  " + row.path;
  }
  if (!missing.empty()) throw IoError("missing signal files:" + missing);

  double w1 = config.get_double("preprocess.w1_ms");
  double w2 = config.get_double("preprocess.w2_ms");
  double f0 = config.get_double("preprocess.f0_hz");
  double q = config.get_double("preprocess.q");
  double seconds = config.get_double("preprocess.segment_seconds");
  int threads = static_cast<int>(config.get_int("runtime.threads"));

  fs::path seg_dir = out / "segments";
  fs::create_directories(seg_dir);

  std::vector<std::vector<std::string>> manifest_lines(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const ManifestRow& row = rows[i];
    sig::SignalRecord rec = sig::load_signal(row.path, row.sampling_rate_hz, row.label);
    rec = sig::remove_baseline(rec, w1, w2);
    rec = sig::notch_filter(rec, f0, q);
    std::vector<sig::Segment> segments = sig::segment_signal(rec, seconds);
    for (std::size_t k = 0; k < segments.size(); ++k) {
      char name[256];
      std::snprintf(name, sizeof name, "%s_%04zu.txt", rec.source_id.c_str(), k);
      write_samples(seg_dir / name, segments[k].samples);
      manifest_lines[i].push_back(std::string("segments/") + name + "," + row.label + "," +
                                  rec.source_id + "," + std::to_string(segments[k].start_index) +
                                  "," + textio::format_double(row.sampling_rate_hz));
    }
  });

  std::string manifest = "path,label,source_id,start_index,sampling_rate_hz\n";
  std::size_t total = 0;
  for (const auto& lines : manifest_lines) {
    for (const auto& line : lines) {
      manifest += line + "\n";
      ++total;
    }
  }
  textio::write_text_file((out / "segments.csv").string(), manifest);
  log_info("preprocess: " + std::to_string(rows.size()) + " records -> " + std::to_string(total) +
           " segments");
}

void run_features(const Config& config) {
  fs::path out = prepare_output(config);
  std::vector<sig::Segment> segments = load_segments((out / "segments.csv").string());
  log_warning(
      "features: bound and normalizer are fitted on the full input; "
      "use the evaluate command for leak-free estimates");

  features::PartitionSpec spec;
  spec.kind = features::parse_partition_kind(config.get("features.kind"));
  std::size_t regions = static_cast<std::size_t>(config.get_int("features.region_count"));
  spec.region_count = regions == 0 ? features::default_region_count(spec.kind) : regions;
  spec.aggregation = features::parse_aggregation(config.get("features.aggregation"));

  std::vector<features::SodpPointSet> sodps(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) sodps[i] = features::sodp(segments[i].samples);
  spec.bound = features::fit_bound(sodps, spec.kind);

  std::vector<std::vector<double>> raw(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) raw[i] = features::extract(sodps[i], spec);

  features::FeatureExtractor extractor{spec, features::fit_normalizer(raw)};
  features::save_extractor(extractor, (out / "extractor.txt").string());

  std::string csv;
  for (std::size_t j = 0; j < spec.feature_count(); ++j) {
    csv += feature_column(spec.kind, j) + ",";
  }
  csv += "label\n";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (double v : raw[i]) {
      csv += textio::format_double(v);
      csv += ',';
    }
    csv += segments[i].label + "\n";
  }
  textio::write_text_file((out / "features.csv").string(), csv);
  log_info("features: " + std::to_string(segments.size()) + " rows x " +
           std::to_string(spec.feature_count()) + " " + features::to_string(spec.kind) +
           " features (bound " + textio::format_double(spec.bound) + ")");
}

void run_train(const Config& config) {
  fs::path out = prepare_output(config);
  FeatureTable table = read_features_csv((out / "features.csv").string());
  features::FeatureExtractor extractor = features::load_extractor((out / "extractor.txt").string());
  if (extractor.spec.feature_count() != table.feature_count) {
    throw DimensionError("train: features.csv has " + std::to_string(table.feature_count) +
                         " columns but the extractor produces " +
                         std::to_string(extractor.spec.feature_count()));
  }

  Matrix x(table.rows.size(), table.feature_count);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto row = features::apply_normalizer(extractor.normalizer, table.rows[i]);
    std::copy(row.begin(), row.end(), &x(i, 0));
  }

  elm::TrainResult result = elm::train(x, table.labels, train_options_from(config));
  result.model.extractor = extractor;
  elm::save_model(result.model, (out / "model.txt").string());

  elm::Prediction pred = elm::predict(result.model, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    if (result.model.class_labels[pred.class_index[i]] == table.labels[i]) ++correct;
  }
  std::string line = "train: " + elm::to_string(result.model.variant) + ", lambda " +
                     textio::format_double(result.model.lambda);
  if (result.sweep) line += ", press " + textio::format_double(result.sweep->best_press);
  line += ", training accuracy " +
          percent(static_cast<double>(correct) / static_cast<double>(table.labels.size()));
  log_info(line);
}

void run_evaluate(const Config& config) {
  fs::path out = prepare_output(config);
  std::vector<sig::Segment> segments = load_segments((out / "segments.csv").string());
  eval::EvalOptions opts = eval_options_from(config);
  eval::CvResult cv = eval::cross_validate(segments, opts);

  std::string csv = "fold,lambda,press,tp,fp,fn,tn,precision,sensitivity,accuracy\n";
  for (const auto& fold : cv.folds) {
    eval::BinaryCounts b = eval::binary_counts(fold.cm, cv.positive_index);
    eval::MetricTriple m = eval::metrics(fold.cm, cv.positive_index);
    csv += std::to_string(fold.fold) + "," + textio::format_double(fold.lambda) + "," +
           format_press(fold.press) + "," + std::to_string(b.tp) + "," + std::to_string(b.fp) +
           "," + std::to_string(b.fn) + "," + std::to_string(b.tn) + "," +
           format_metric(m.precision) + "," + format_metric(m.sensitivity) + "," +
           textio::format_double(m.overall_accuracy) + "\n";
  }
  textio::write_text_file((out / "report.csv").string(), csv);

  eval::BinaryCounts b = eval::binary_counts(cv.aggregate, cv.positive_index);
  std::string classes;
  for (std::size_t i = 0; i < cv.class_labels.size(); ++i) {
    if (i != 0) classes += ',';
    classes += cv.class_labels[i];
  }
  std::string summary = "hesselm evaluation summary\n";
  summary += "variant = " + config.get("model.variant") + "\n";
  summary += "feature_kind = " + config.get("features.kind") + "\n";
  summary += "folds = " + std::to_string(cv.folds.size()) + "\n";
  summary += "samples = " + std::to_string(cv.aggregate.total()) + "\n";
  summary += "classes = " + classes + "\n";
  summary += "positive_class = " + opts.positive_class + "\n";
  summary += "tp = " + std::to_string(b.tp) + "\n";
  summary += "fp = " + std::to_string(b.fp) + "\n";
  summary += "fn = " + std::to_string(b.fn) + "\n";
  summary += "tn = " + std::to_string(b.tn) + "\n";
  summary += "precision = " + format_metric(cv.aggregate_metrics.precision) + "\n";
  summary += "sensitivity = " + format_metric(cv.aggregate_metrics.sensitivity) + "\n";
  summary += "overall_accuracy = " + textio::format_double(cv.aggregate_metrics.overall_accuracy) +
             "\n";
  textio::write_text_file((out / "summary.txt").string(), summary);

  std::string precision_txt =
      cv.aggregate_metrics.precision ? percent(*cv.aggregate_metrics.precision) : "NA";
  std::string sensitivity_txt =
      cv.aggregate_metrics.sensitivity ? percent(*cv.aggregate_metrics.sensitivity) : "NA";
  log_info("evaluate: precision " + precision_txt + ", sensitivity " + sensitivity_txt +
           ", overall accuracy " + percent(cv.aggregate_metrics.overall_accuracy));
}

void run_sweep(const Config& config) {
  fs::path out = prepare_output(config);
  std::vector<sig::Segment> segments = load_segments((out / "segments.csv").string());
  eval::EvalOptions opts = eval_options_from(config);
  std::vector<eval::SweepRow> rows = lambda_sweep(segments, opts, lambda_grid_from(config));

  std::string csv = "lambda_exponent,lambda,mean_press,mean_accuracy\n";
  for (const auto& row : rows) {
    char expbuf[32];
    std::snprintf(expbuf, sizeof expbuf, "%g", row.exponent);
    csv += std::string(expbuf) + "," + textio::format_double(row.lambda) + "," +
           format_press(row.mean_press) + "," + textio::format_double(row.accuracy) + "\n";
  }
  textio::write_text_file((out / "sweep.csv").string(), csv);

  std::string chart = "lambda sweep: accuracy (#, 0..1) and mean PRESS per candidate\n";
  for (const auto& row : rows) {
    char head[64];
    std::snprintf(head, sizeof head, "e^%-4g acc %.4f ", row.exponent, row.accuracy);
    chart += head;
    int bars = static_cast<int>(std::lround(row.accuracy * 40.0));
    chart.append(static_cast<std::size_t>(std::max(bars, 0)), '#');
    chart += "  press " + format_press(row.mean_press) + "\n";
  }
  textio::write_text_file((out / "sweep.txt").string(), chart);
  log_info("sweep: " + std::to_string(rows.size()) + " candidates written to " +
           (out / "sweep.csv").string());
}

void run_pipeline(const Config& config) {
  if (config.get_bool("synth.enabled")) run_synth(config);
  run_preprocess(config);
  run_features(config);
  run_train(config);
  run_evaluate(config);
}

}  // namespace hesselm::pipeline
