#include "cogspeech/dsp/filter.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::dsp {

FilterSpec DesignHighpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 1) throw ConfigError("filter order must be >= 1");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw ConfigError("cutoff " + FormatDouble(cutoff_hz) +
                      " Hz must lie in (0, Nyquist=" +
                      FormatDouble(sample_rate / 2.0) + ")");
  }
  FilterSpec spec;
  spec.design = {order, cutoff_hz, FilterKind::kHighpass};
  spec.sample_rate = sample_rate;

  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  for (int i = 0; i < order / 2; ++i) {
    // Conjugate pole pair of the analog prototype: s^2 + s/q + 1.
    const double inv_q =
        2.0 * std::sin(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order));
    const double norm = 1.0 / (1.0 + k * inv_q + k2);
    Biquad bq;
    bq.b0 = norm;
    bq.b1 = -2.0 * norm;
    bq.b2 = norm;
    bq.a1 = 2.0 * (k2 - 1.0) * norm;
    bq.a2 = (1.0 - k * inv_q + k2) * norm;
    spec.sections.push_back(bq);
  }
  if (order % 2 == 1) {
    Biquad bq;
    bq.b0 = 1.0 / (1.0 + k);
    bq.b1 = -bq.b0;
    bq.a1 = (k - 1.0) / (k + 1.0);
    spec.sections.push_back(bq);
  }
  return spec;
}

double MagnitudeDb(const FilterSpec& spec, double freq_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / spec.sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& s : spec.sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return 20.0 * std::log10(std::abs(h));
}

double MaxPoleRadius(const FilterSpec& spec) {
  double r = 0.0;
  for (const Biquad& s : spec.sections) {
    // Roots of z^2 + a1 z + a2.
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    const std::complex<double> p1 = (-s.a1 + disc) / 2.0;
    const std::complex<double> p2 = (-s.a1 - disc) / 2.0;
    r = std::max({r, std::abs(p1), std::abs(p2)});
  }
  return r;
}

void FilterInPlace(const Biquad& bq, std::vector<double>& samples) {
  double s1 = 0.0, s2 = 0.0;
  for (double& v : samples) {
    const double x = v;
    const double y = bq.b0 * x + s1;
    s1 = bq.b1 * x - bq.a1 * y + s2;
    s2 = bq.b2 * x - bq.a2 * y;
    v = y;
  }
}

Signal ApplyFilter(const FilterSpec& spec, const Signal& x) {
  if (std::abs(spec.sample_rate - x.sample_rate) > 1e-9) {
    throw ConfigError("filter designed for " + FormatDouble(spec.sample_rate) +
                      " Hz applied to " + FormatDouble(x.sample_rate) +
                      " Hz signal");
  }
  Signal y = x;
  for (const Biquad& bq : spec.sections) FilterInPlace(bq, y.samples);
  return y;
}

}  // namespace cogspeech::dsp
