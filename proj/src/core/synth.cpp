#include "core/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace hesselm::synth {

namespace {

struct ClassProfile {
  const char* label;
  const char* stem;
  double beat_period_s;
  double rhythm_jitter;     // relative beat-to-beat period variation
  double spike_amplitude;   // R spike height
  double spike_variation;   // beat-to-beat amplitude variation
};

constexpr ClassProfile kProfiles[2] = {
    {"CHF", "chf", 0.85, 0.15, 0.70, 0.45},
    {"NORMAL", "normal", 0.75, 0.02, 1.30, 0.08},
};

void add_bump(std::vector<double>& samples, double rate, double centre_s, double amplitude,
              double width_s) {
  double lo = centre_s - 4.0 * width_s;
  double hi = centre_s + 4.0 * width_s;
  auto first = static_cast<long long>(std::floor(lo * rate));
  auto last = static_cast<long long>(std::ceil(hi * rate));
  first = std::max<long long>(first, 0);
  last = std::min<long long>(last, static_cast<long long>(samples.size()) - 1);
  for (long long i = first; i <= last; ++i) {
    double t = static_cast<double>(i) / rate - centre_s;
    samples[static_cast<std::size_t>(i)] += amplitude * std::exp(-t * t / (2.0 * width_s * width_s));
  }
}

sig::SignalRecord make_record(const ClassProfile& profile, std::size_t index,
                              const SynthOptions& options, std::uint64_t seed) {
  double rate = options.sampling_rate_hz;
  double duration = options.segment_seconds * static_cast<double>(options.segments_per_record);
  auto n = static_cast<std::size_t>(std::llround(duration * rate));
  Rng rng(seed);

  sig::SignalRecord rec;
  rec.sampling_rate_hz = rate;
  rec.label = profile.label;
  char id[32];
  std::snprintf(id, sizeof id, "%s_%02zu", profile.stem, index + 1);
  rec.source_id = id;
  rec.samples.assign(n, 0.0);

  // beat train with per-beat spike amplitude
  double t = 0.2 + 0.3 * rng.next_unit();
  while (t < duration + 1.0) {
    double amp = profile.spike_amplitude * (1.0 + profile.spike_variation * rng.next_symmetric());
    add_bump(rec.samples, rate, t - 0.18, 0.12, 0.035);            // P
    add_bump(rec.samples, rate, t - 0.035, -0.12 * amp, 0.012);    // Q
    add_bump(rec.samples, rate, t, amp, 0.012);                    // R
    add_bump(rec.samples, rate, t + 0.035, -0.18 * amp, 0.014);    // S
    add_bump(rec.samples, rate, t + 0.28, 0.28, 0.060);            // T
    t += profile.beat_period_s * (1.0 + profile.rhythm_jitter * rng.next_symmetric());
  }

  // respiration-scale baseline wander, mains hum, and measurement noise
  double ph1 = 2.0 * M_PI * rng.next_unit();
  double ph2 = 2.0 * M_PI * rng.next_unit();
  double ph3 = 2.0 * M_PI * rng.next_unit();
  for (std::size_t i = 0; i < n; ++i) {
    double ts = static_cast<double>(i) / rate;
    rec.samples[i] += 0.40 * std::sin(2.0 * M_PI * 0.22 * ts + ph1);
    rec.samples[i] += 0.25 * std::sin(2.0 * M_PI * 0.07 * ts + ph2);
    rec.samples[i] += 0.12 * std::sin(2.0 * M_PI * 60.0 * ts + ph3);
    rec.samples[i] += 0.02 * rng.next_symmetric();
  }
  return rec;
}

}  // namespace

std::vector<sig::SignalRecord> synth_records(const SynthOptions& options) {
  if (options.records_per_class < 1) throw ValidationError("synth: need at least one record per class");
  if (options.segments_per_record < 1) throw ValidationError("synth: need at least one segment per record");
  if (options.sampling_rate_hz <= 120.0) {
    throw ValidationError("synth: sampling rate must exceed 120 Hz so the mains tone is representable");
  }
  std::vector<sig::SignalRecord> records;
  records.reserve(2 * options.records_per_class);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t r = 0; r < options.records_per_class; ++r) {
      std::uint64_t seed = options.seed * 1000003ULL + c * 101ULL + r;
      records.push_back(make_record(kProfiles[c], r, options, seed));
    }
  }
  return records;
}

}  // namespace hesselm::synth
