#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/textio.hpp"

namespace hesselm::features {

// Scatter of consecutive first differences (a_i, b_i) of a time series.
struct SodpPoint {
  double a;
  double b;
};

struct SodpPointSet {
  std::vector<SodpPoint> points;
};

enum class PartitionKind { circled, squared, inclined, grid };
enum class Aggregation { count, probability, shannon };

PartitionKind parse_partition_kind(const std::string& name);
Aggregation parse_aggregation(const std::string& name);
std::string to_string(PartitionKind kind);
std::string to_string(Aggregation mode);

// 15 annuli / 15 square bands / 16 sectors + central disc / 8x8 grid.
std::size_t default_region_count(PartitionKind kind);

// Fitted partition geometry. For grid, region_count is the cell count per
// axis and the feature vector has region_count² entries.
struct PartitionSpec {
  PartitionKind kind = PartitionKind::inclined;
  std::size_t region_count = 17;
  double bound = 0.0;
  Aggregation aggregation = Aggregation::probability;

  std::size_t feature_count() const {
    return kind == PartitionKind::grid ? region_count * region_count : region_count;
  }
};

SodpPointSet sodp(std::span<const double> samples);

// 99th percentile (nearest rank) of the per-point extent: radial distance for
// circled/inclined partitions, Chebyshev distance for squared/grid.
double fit_bound(const std::vector<SodpPointSet>& training, PartitionKind kind);

// Index of the region a point falls in; every point maps to exactly one
// region. Points beyond the bound land in the outermost band (circled,
// squared) or are clamped to the border cells (grid).
std::size_t region_index(const SodpPoint& p, const PartitionSpec& spec);

std::vector<double> extract(const SodpPointSet& points, const PartitionSpec& spec);

// Per-feature training range used for the [-1, 1] linear rescale.
struct Normalizer {
  std::vector<double> min;
  std::vector<double> max;
};

Normalizer fit_normalizer(const std::vector<std::vector<double>>& train_features);
std::vector<double> apply_normalizer(const Normalizer& n, std::span<const double> features);

// Fitted geometry plus normalization coefficients, persisted with the model.
struct FeatureExtractor {
  PartitionSpec spec;
  Normalizer normalizer;

  std::vector<double> transform(const SodpPointSet& points) const;
};

void write_extractor_block(std::string& out, const FeatureExtractor& e);
FeatureExtractor read_extractor_block(textio::LineReader& reader);

void save_extractor(const FeatureExtractor& e, const std::string& path);
FeatureExtractor load_extractor(const std::string& path);

}  // namespace hesselm::features
