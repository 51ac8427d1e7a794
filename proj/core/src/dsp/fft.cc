#include "cogspeech/dsp/fft.h"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace cogspeech::dsp {

struct RealFft::Impl {
  Eigen::FFT<double> fft;
  std::vector<double> real_buf;
  std::vector<std::complex<double>> complex_buf;
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  impl_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->real_buf.resize(n);
  impl_->complex_buf.resize(n / 2 + 1);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::Forward(std::span<const double> in,
                      std::vector<std::complex<double>>& out) {
  impl_->real_buf.assign(in.begin(), in.end());
  impl_->fft.fwd(out, impl_->real_buf);
  out.resize(num_bins());
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::vector<double>& out) {
  impl_->complex_buf.assign(in.begin(), in.end());
  impl_->fft.inv(out, impl_->complex_buf, static_cast<Eigen::Index>(n_));
  out.resize(n_);
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace cogspeech::dsp
