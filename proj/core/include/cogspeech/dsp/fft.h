#ifndef COGSPEECH_DSP_FFT_H_
#define COGSPEECH_DSP_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cogspeech::dsp {

// Real-input FFT of a fixed size returning the n/2+1 non-negative bins.
// Not thread-safe; use one instance per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }
  std::size_t num_bins() const { return n_ / 2 + 1; }

  // `in` must hold exactly size() samples.
  void Forward(std::span<const double> in,
               std::vector<std::complex<double>>& out);
  // `in` must hold num_bins() bins; writes size() samples.
  void Inverse(std::span<const std::complex<double>> in,
               std::vector<double>& out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

// Periodic Hann window of length n.
std::vector<double> HannWindow(std::size_t n);

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_FFT_H_
