#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hesselm::sig {

// Uniformly sampled 1-D waveform with its class label.
struct SignalRecord {
  std::vector<double> samples;
  double sampling_rate_hz = 0.0;
  std::string label;
  std::string source_id;
};

// Fixed-length window cut from a record.
struct Segment {
  std::vector<double> samples;
  std::string label;
  std::string source_id;
  std::size_t start_index = 0;
};

// Parses one sample per line (plain text or single-column CSV); a single
// non-numeric header line is skipped.
SignalRecord load_signal(const std::string& path, double sampling_rate_hz,
                         const std::string& label, const std::string& source_id = "");

// Median filter with an odd window; the window shrinks symmetrically at the
// boundaries so edge samples are medians of smaller odd windows.
std::vector<double> median_filter(std::span<const double> x, std::size_t window);

// Subtracts the baseline estimated by two cascaded median filters. Window
// sizes are round(w_ms * rate / 1000), forced odd.
SignalRecord remove_baseline(const SignalRecord& s, double w1_ms, double w2_ms);

// Zero-phase second-order IIR notch (forward-backward biquad) centred at
// f0_hz with quality factor q.
SignalRecord notch_filter(const SignalRecord& s, double f0_hz, double q);

// Non-overlapping consecutive windows of round(segment_seconds * rate)
// samples; a trailing partial window is discarded.
std::vector<Segment> segment_signal(const SignalRecord& s, double segment_seconds);

}  // namespace hesselm::sig
