#include "core/features.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace hesselm::features {

namespace {

double radial(const SodpPoint& p) { return std::hypot(p.a, p.b); }
double chebyshev(const SodpPoint& p) { return std::max(std::fabs(p.a), std::fabs(p.b)); }

bool uses_radial(PartitionKind kind) {
  return kind == PartitionKind::circled || kind == PartitionKind::inclined;
}

// Band index 1..k for a distance d against nested boundaries j·bound/k;
// values beyond the bound are clamped into the outermost band.
std::size_t band_index(double d, double bound, std::size_t k) {
  double scaled = d * static_cast<double>(k) / bound;
  auto idx = static_cast<long long>(std::ceil(scaled));
  if (idx < 1) idx = 1;
  if (idx > static_cast<long long>(k)) idx = static_cast<long long>(k);
  return static_cast<std::size_t>(idx);
}

}  // namespace

PartitionKind parse_partition_kind(const std::string& name) {
  if (name == "circled") return PartitionKind::circled;
  if (name == "squared") return PartitionKind::squared;
  if (name == "inclined") return PartitionKind::inclined;
  if (name == "grid") return PartitionKind::grid;
  throw ValidationError("unknown partition kind '" + name +
                        "' (expected circled, squared, inclined, or grid)");
}

Aggregation parse_aggregation(const std::string& name) {
  if (name == "count") return Aggregation::count;
  if (name == "probability") return Aggregation::probability;
  if (name == "shannon") return Aggregation::shannon;
  throw ValidationError("unknown aggregation '" + name +
                        "' (expected count, probability, or shannon)");
}

std::string to_string(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::circled: return "circled";
    case PartitionKind::squared: return "squared";
    case PartitionKind::inclined: return "inclined";
    case PartitionKind::grid: return "grid";
  }
  return "?";
}

std::string to_string(Aggregation mode) {
  switch (mode) {
    case Aggregation::count: return "count";
    case Aggregation::probability: return "probability";
    case Aggregation::shannon: return "shannon";
  }
  return "?";
}

std::size_t default_region_count(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::circled: return 15;
    case PartitionKind::squared: return 15;
    case PartitionKind::inclined: return 17;
    case PartitionKind::grid: return 8;
  }
  return 0;
}

SodpPointSet sodp(std::span<const double> samples) {
  if (samples.size() < 3) {
    throw ValidationError("sodp: need at least 3 samples, got " + std::to_string(samples.size()));
  }
  SodpPointSet out;
  out.points.reserve(samples.size() - 2);
  for (std::size_t i = 0; i + 2 < samples.size(); ++i) {
    out.points.push_back({samples[i + 1] - samples[i], samples[i + 2] - samples[i + 1]});
  }
  return out;
}

double fit_bound(const std::vector<SodpPointSet>& training, PartitionKind kind) {
  std::vector<double> extents;
  for (const auto& set : training) {
    for (const auto& p : set.points) {
      extents.push_back(uses_radial(kind) ? radial(p) : chebyshev(p));
    }
  }
  if (extents.empty()) throw ValidationError("fit_bound: no training points");
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(extents.size())));
  if (rank == 0) rank = 1;
  std::nth_element(extents.begin(), extents.begin() + (rank - 1), extents.end());
  double bound = extents[rank - 1];
  if (bound <= 0.0) {
    throw ValidationError("fit_bound: degenerate training data (all points at the origin)");
  }
  return bound;
}

std::size_t region_index(const SodpPoint& p, const PartitionSpec& spec) {
  std::size_t k = spec.region_count;
  switch (spec.kind) {
    case PartitionKind::circled:
      return band_index(radial(p), spec.bound, k) - 1;
    case PartitionKind::squared:
      return band_index(chebyshev(p), spec.bound, k) - 1;
    case PartitionKind::inclined: {
      // feature 0 is the central disc; 1..k-1 are equal-angle sectors
      // starting at -pi, half-open except the wrap-around edge.
      if (radial(p) <= spec.bound / static_cast<double>(k)) return 0;
      double width = 2.0 * M_PI / static_cast<double>(k - 1);
      auto sector = static_cast<long long>(std::floor((std::atan2(p.b, p.a) + M_PI) / width));
      if (sector < 0) sector = 0;
      if (sector > static_cast<long long>(k - 2)) sector = static_cast<long long>(k - 2);
      return 1 + static_cast<std::size_t>(sector);
    }
    case PartitionKind::grid: {
      double cell = 2.0 * spec.bound / static_cast<double>(k);
      auto clamp_axis = [&](double v) {
        auto idx = static_cast<long long>(std::floor((v + spec.bound) / cell));
        if (idx < 0) idx = 0;
        if (idx > static_cast<long long>(k - 1)) idx = static_cast<long long>(k - 1);
        return static_cast<std::size_t>(idx);
      };
      return clamp_axis(p.b) * k + clamp_axis(p.a);
    }
  }
  throw ValidationError("region_index: unknown partition kind");
}

std::vector<double> extract(const SodpPointSet& points, const PartitionSpec& spec) {
  if (spec.bound <= 0.0) throw ValidationError("extract: partition bound is not fitted");
  if (spec.region_count < 2) throw ValidationError("extract: region count must be at least 2");
  std::vector<double> tally(spec.feature_count(), 0.0);
  if (points.points.empty()) {
    log_warning("extract: empty point set, emitting zero features");
    return tally;
  }
  for (const auto& p : points.points) tally[region_index(p, spec)] += 1.0;
  if (spec.aggregation == Aggregation::count) return tally;
  double total = static_cast<double>(points.points.size());
  for (double& t : tally) t /= total;
  if (spec.aggregation == Aggregation::shannon) {
    for (double& t : tally) t = t > 0.0 ? -t * std::log(t) : 0.0;
  }
  return tally;
}

Normalizer fit_normalizer(const std::vector<std::vector<double>>& train_features) {
  if (train_features.empty()) throw ValidationError("fit_normalizer: empty training set");
  std::size_t dim = train_features.front().size();
  Normalizer n;
  n.min.assign(dim, 0.0);
  n.max.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    n.min[j] = n.max[j] = train_features.front()[j];
  }
  for (const auto& row : train_features) {
    if (row.size() != dim) throw DimensionError("fit_normalizer: ragged feature rows");
    for (std::size_t j = 0; j < dim; ++j) {
      n.min[j] = std::min(n.min[j], row[j]);
      n.max[j] = std::max(n.max[j], row[j]);
    }
  }
  return n;
}

std::vector<double> apply_normalizer(const Normalizer& n, std::span<const double> features) {
  if (features.size() != n.min.size()) {
    throw DimensionError("apply_normalizer: got " + std::to_string(features.size()) +
                         " features, normalizer was fitted on " + std::to_string(n.min.size()));
  }
  std::vector<double> out(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    double range = n.max[j] - n.min[j];
    out[j] = range == 0.0 ? 0.0 : 2.0 * (features[j] - n.min[j]) / range - 1.0;
  }
  return out;
}

std::vector<double> FeatureExtractor::transform(const SodpPointSet& points) const {
  return apply_normalizer(normalizer, extract(points, spec));
}

void write_extractor_block(std::string& out, const FeatureExtractor& e) {
  out += "kind = " + to_string(e.spec.kind) + "\n";
  out += "region_count = " + std::to_string(e.spec.region_count) + "\n";
  out += "bound = " + textio::format_double(e.spec.bound) + "\n";
  out += "aggregation = " + to_string(e.spec.aggregation) + "\n";
  out += "normalizer_min " + std::to_string(e.normalizer.min.size()) + "\n";
  out += textio::join_doubles(e.normalizer.min) + "\n";
  out += "normalizer_max " + std::to_string(e.normalizer.max.size()) + "\n";
  out += textio::join_doubles(e.normalizer.max) + "\n";
}

FeatureExtractor read_extractor_block(textio::LineReader& reader) {
  FeatureExtractor e;
  e.spec.kind = parse_partition_kind(reader.expect_value("kind"));
  long long regions = textio::parse_int_strict(reader.expect_value("region_count"),
                                               reader.name() + ": region_count");
  if (regions < 2) throw ParseError(reader.name() + ": region_count must be at least 2");
  e.spec.region_count = static_cast<std::size_t>(regions);
  e.spec.bound = textio::parse_double_strict(reader.expect_value("bound"),
                                             reader.name() + ": bound");
  if (e.spec.bound <= 0.0) throw ParseError(reader.name() + ": bound must be positive");
  e.spec.aggregation = parse_aggregation(reader.expect_value("aggregation"));

  auto read_list = [&](const std::string& key) {
    std::string header = reader.next(key);
    auto tokens = textio::split(header, ' ');
    if (tokens.size() != 2 || tokens[0] != key) {
      throw ParseError(reader.name() + ": expected '" + key + " <count>', got '" + header + "'");
    }
    auto count = static_cast<std::size_t>(
        textio::parse_int_strict(tokens[1], reader.name() + ": " + key));
    return textio::parse_double_list(reader.next(key + " values"), count,
                                     reader.name() + ": " + key);
  };
  e.normalizer.min = read_list("normalizer_min");
  e.normalizer.max = read_list("normalizer_max");
  if (e.normalizer.min.size() != e.spec.feature_count() ||
      e.normalizer.max.size() != e.spec.feature_count()) {
    throw ParseError(reader.name() + ": normalizer size does not match the partition");
  }
  return e;
}

void save_extractor(const FeatureExtractor& e, const std::string& path) {
  std::string out = "hesselm extractor 1\n";
  write_extractor_block(out, e);
  out += "end\n";
  textio::write_text_file(path, out);
}

FeatureExtractor load_extractor(const std::string& path) {
  auto reader = textio::LineReader::from_file(path);
  std::string header = reader.next("header");
  auto tokens = textio::split(header, ' ');
  if (tokens.size() != 3 || tokens[0] != "hesselm" || tokens[1] != "extractor") {
    throw ParseError(path + ": not an extractor file");
  }
  long long version = textio::parse_int_strict(tokens[2], path + ": version");
  if (version > 1) {
    throw VersionError(path + ": extractor format version " + std::to_string(version) +
                       " is newer than this toolkit supports (1)");
  }
  FeatureExtractor e;
  try {
    e = read_extractor_block(reader);
  } catch (const ValidationError& err) {
    throw ParseError(path + ": " + err.what());
  }
  if (reader.next("end") != "end") throw ParseError(path + ": missing end marker");
  return e;
}

}  // namespace hesselm::features
