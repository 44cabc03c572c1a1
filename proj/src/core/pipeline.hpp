#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/signal.hpp"

namespace hesselm::pipeline {

// Each command reads its inputs from the configured paths, writes its
// artifacts under data.output_dir, and echoes the effective configuration
// there for provenance. All outputs are deterministic functions of the
// configuration.
void run_synth(const Config& config);
void run_preprocess(const Config& config);
void run_features(const Config& config);
void run_train(const Config& config);
void run_evaluate(const Config& config);
void run_sweep(const Config& config);

// synth (when enabled) → preprocess → features → train → evaluate
void run_pipeline(const Config& config);

// shared plumbing, also used by the tests
std::vector<sig::Segment> load_segments(const std::string& segment_manifest);
eval::EvalOptions eval_options_from(const Config& config);
std::vector<double> lambda_grid_from(const Config& config);

}  // namespace hesselm::pipeline
