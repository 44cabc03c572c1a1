#pragma once

#include <cstdint>
#include <vector>

#include "core/signal.hpp"

namespace hesselm::synth {

struct SynthOptions {
  std::size_t records_per_class = 5;
  std::size_t segments_per_record = 40;
  double sampling_rate_hz = 250.0;
  double segment_seconds = 10.0;
  std::uint64_t seed = 7;
};

// Two-class synthetic waveforms: noisy periodic beat templates with
// class-dependent spike amplitude and rhythm regularity, plus baseline
// wander and mains interference for the preprocessing stage to remove.
// Classes are labelled CHF (irregular, variable spikes) and NORMAL.
std::vector<sig::SignalRecord> synth_records(const SynthOptions& options);

}  // namespace hesselm::synth
