#include "core/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace hesselm::sig {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::size_t window_samples(double w_ms, double rate_hz) {
  auto w = static_cast<std::size_t>(std::llround(w_ms * rate_hz / 1000.0));
  if (w % 2 == 0) ++w;
  return w;
}

// One pass of a direct-form-II-transposed biquad.
void biquad_forward(std::span<double> x, double b0, double b1, double b2, double a1, double a2) {
  double z1 = 0.0, z2 = 0.0;
  for (double& v : x) {
    double in = v;
    double out = b0 * in + z1;
    z1 = b1 * in - a1 * out + z2;
    z2 = b2 * in - a2 * out;
    v = out;
  }
}

}  // namespace

SignalRecord load_signal(const std::string& path, double sampling_rate_hz,
                         const std::string& label, const std::string& source_id) {
  if (sampling_rate_hz <= 0.0) throw ValidationError("load_signal: sampling rate must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("load_signal: cannot open '" + path + "'");

  SignalRecord rec;
  rec.sampling_rate_hz = sampling_rate_hz;
  rec.label = label;
  if (source_id.empty()) {
    std::size_t slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = stem.find_last_of('.');
    rec.source_id = dot == std::string::npos ? stem : stem.substr(0, dot);
  } else {
    rec.source_id = source_id;
  }

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string value = trim(line);
    if (value.empty()) continue;
    double v = 0.0;
    if (!parse_double(value, v)) {
      if (line_no == 1 && rec.samples.empty()) continue;  // header line
      throw ParseError("load_signal: '" + path + "' line " + std::to_string(line_no) +
                       ": not a number: '" + value + "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError("load_signal: '" + path + "' line " + std::to_string(line_no) +
                       ": non-finite sample");
    }
    rec.samples.push_back(v);
  }
  if (rec.samples.empty()) throw ParseError("load_signal: '" + path + "' contains no samples");
  return rec;
}

std::vector<double> median_filter(std::span<const double> x, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw ValidationError("median_filter: window must be odd");
  std::size_t n = x.size();
  if (window > n) {
    throw ValidationError("median_filter: window " + std::to_string(window) +
                          " longer than signal of " + std::to_string(n) + " samples");
  }
  std::size_t half = window / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  buf.reserve(window);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t radius = std::min({half, i, n - 1 - i});
    buf.assign(x.begin() + (i - radius), x.begin() + (i + radius + 1));
    auto mid = buf.begin() + radius;
    std::nth_element(buf.begin(), mid, buf.end());
    out[i] = *mid;
  }
  return out;
}

SignalRecord remove_baseline(const SignalRecord& s, double w1_ms, double w2_ms) {
  if (w1_ms <= 0.0 || w2_ms <= 0.0) throw ValidationError("remove_baseline: windows must be positive");
  if (w1_ms >= w2_ms) throw ValidationError("remove_baseline: first window must be shorter than second");
  std::size_t w1 = window_samples(w1_ms, s.sampling_rate_hz);
  std::size_t w2 = window_samples(w2_ms, s.sampling_rate_hz);
  std::vector<double> baseline = median_filter(s.samples, w1);
  baseline = median_filter(baseline, w2);
  SignalRecord out = s;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= baseline[i];
  return out;
}

namespace {

// Least-squares quadrature fit of the component at w0 over samples
// [start, start+len), phase-referenced to sample index 0.
struct ToneFit {
  double a = 0.0;  // cos coefficient
  double b = 0.0;  // sin coefficient

  double at(double k, double w0) const { return a * std::cos(w0 * k) + b * std::sin(w0 * k); }
};

ToneFit fit_tone(std::span<const double> x, std::size_t start, std::size_t len, double w0) {
  double cc = 0.0, cs = 0.0, ss = 0.0, cx = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double k = static_cast<double>(start + i);
    double c = std::cos(w0 * k), s = std::sin(w0 * k);
    cc += c * c;
    cs += c * s;
    ss += s * s;
    cx += c * x[start + i];
    sx += s * x[start + i];
  }
  double det = cc * ss - cs * cs;
  ToneFit fit;
  if (len >= 8 && std::fabs(det) > 1e-9 * cc * ss) {
    fit.a = (ss * cx - cs * sx) / det;
    fit.b = (cc * sx - cs * cx) / det;
  }
  return fit;
}

}  // namespace

SignalRecord notch_filter(const SignalRecord& s, double f0_hz, double q) {
  double nyquist = s.sampling_rate_hz / 2.0;
  if (f0_hz <= 0.0 || f0_hz >= nyquist) {
    throw ValidationError("notch_filter: centre frequency " + std::to_string(f0_hz) +
                          " Hz must lie in (0, " + std::to_string(nyquist) + ")");
  }
  if (q <= 0.0) throw ValidationError("notch_filter: quality factor must be positive");

  double w0 = 2.0 * M_PI * f0_hz / s.sampling_rate_hz;
  double alpha = std::sin(w0) / (2.0 * q);
  double a0 = 1.0 + alpha;
  double b0 = 1.0 / a0;
  double b1 = -2.0 * std::cos(w0) / a0;
  double b2 = b0;
  double a1 = b1;
  double a2 = (1.0 - alpha) / a0;

  // Padding long enough for the notch ring-down. A plain reflection is
  // phase-discontinuous in the f0 component at the junction, and that click
  // sits exactly on the filter's pole, so it rings far into the record.
  // Instead the locally fitted f0 tone is continued coherently and only the
  // residual is odd-reflected.
  std::size_t n = s.samples.size();
  double bandwidth_hz = f0_hz / q;
  auto pad = static_cast<std::size_t>(std::ceil(3.0 * s.sampling_rate_hz / bandwidth_hz));
  pad = std::min(pad, n > 1 ? n - 1 : 0);
  std::size_t fit_len = std::min(n, pad > 0 ? pad : n);

  ToneFit head = fit_tone(s.samples, 0, fit_len, w0);
  ToneFit tail = fit_tone(s.samples, n - fit_len, fit_len, w0);
  double res_first = s.samples[0] - head.at(0.0, w0);
  double res_last = s.samples[n - 1] - tail.at(static_cast<double>(n - 1), w0);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) {
    double res = s.samples[i] - head.at(static_cast<double>(i), w0);
    ext.push_back(head.at(-static_cast<double>(i), w0) + 2.0 * res_first - res);
  }
  ext.insert(ext.end(), s.samples.begin(), s.samples.end());
  for (std::size_t i = 1; i <= pad; ++i) {
    double res = s.samples[n - 1 - i] - tail.at(static_cast<double>(n - 1 - i), w0);
    ext.push_back(tail.at(static_cast<double>(n - 1 + i), w0) + 2.0 * res_last - res);
  }

  biquad_forward(ext, b0, b1, b2, a1, a2);
  std::reverse(ext.begin(), ext.end());
  biquad_forward(ext, b0, b1, b2, a1, a2);
  std::reverse(ext.begin(), ext.end());

  SignalRecord out = s;
  std::copy(ext.begin() + pad, ext.begin() + pad + n, out.samples.begin());
  return out;
}

std::vector<Segment> segment_signal(const SignalRecord& s, double segment_seconds) {
  double samples = segment_seconds * s.sampling_rate_hz;
  if (samples < 3.0) {
    throw ValidationError("segment_signal: segments need at least 3 samples, got " +
                          std::to_string(samples));
  }
  auto len = static_cast<std::size_t>(std::llround(samples));
  std::size_t count = s.samples.size() / len;
  if (count == 0) {
    log_warning("record '" + s.source_id + "' is shorter than one segment (" +
                std::to_string(s.samples.size()) + " < " + std::to_string(len) + " samples)");
  }
  std::vector<Segment> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Segment seg;
    seg.samples.assign(s.samples.begin() + k * len, s.samples.begin() + (k + 1) * len);
    seg.label = s.label;
    seg.source_id = s.source_id;
    seg.start_index = k * len;
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace hesselm::sig
