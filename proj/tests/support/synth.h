#ifndef COGSPEECH_TESTS_SUPPORT_SYNTH_H_
#define COGSPEECH_TESTS_SUPPORT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cogspeech/common/signal.h"
#include "cogspeech/corpus/types.h"

namespace cogspeech::testing {

Signal Sine(double freq_hz, double amplitude, double duration_s, double fs = 16000.0,
            double phase = 0.0);
Signal WhiteNoise(double rms, double duration_s, std::uint64_t seed, double fs = 16000.0);
Signal Constant(double value, std::size_t n, double fs = 16000.0);
// Sample-wise sum; the result has the length of the longer input.
Signal Mix(const Signal& a, const Signal& b);
double Rms(const Signal& x);

// Unit impulses at cumulative positions of `periods` (in samples, rounded).
Signal PulseTrain(const std::vector<double>& periods, std::size_t n, double fs = 16000.0);
// Two-pole resonator with unit gain at DC removed: centre `f_hz`, bandwidth
// `bw_hz`.
Signal Resonate(const Signal& x, double f_hz, double bw_hz);
// Pulse train at `f0_hz` through resonators at (f1, bw1), (f2, bw2), scaled
// to `peak` absolute maximum.
Signal Vowel(double f0_hz, double duration_s, double f1, double bw1, double f2, double bw2,
             double peak = 0.5, double fs = 16000.0);

// Speakers spk0..spk<n-1>; onsets and durations on a `grid_s` lattice inside
// [0, total_s). Same-speaker segments never overlap.
corpus::Timeline RandomTimeline(std::mt19937_64& rng, int max_speakers, int max_segments,
                                double total_s, double grid_s = 0.01);
// Same segments with every label passed through `rename`.
corpus::Timeline Relabel(const corpus::Timeline& tl,
                         const std::map<std::string, std::string>& rename);

// Brute-force frame-level diarization scores. Frames are [k h, (k+1) h)
// sampled at their midpoint; the speaker mapping is found by enumerating
// every partial one-to-one mapping.
struct FrameScores {
  double der = 0.0;  // NaN when nothing is scored
  double jer = 0.0;  // NaN for an empty reference
  double purity = 0.0;
  double coverage = 0.0;
};
FrameScores FrameOracle(const corpus::Timeline& ref, const corpus::Timeline& hyp,
                        double collar_s, bool score_overlap, double frame_s = 0.01);

// A small clinical corpus on disk: one session per subject, a participant
// voice whose F0 rises linearly with the MMSE score, and an examiner voice
// at a fixed pitch.
struct CorpusSpec {
  int subjects = 20;
  double duration_s = 20.0;
  int holdout_subjects = 6;
  std::uint64_t seed = 7;
  double fs = 16000.0;
  // Add this many seconds of noise-only lead-in.
  double lead_in_s = 0.0;
};
struct CorpusFiles {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::filesystem::path rttm_dir;
  std::vector<std::string> session_ids;
  std::vector<double> mmse;
};
CorpusFiles WriteCorpus(const std::filesystem::path& dir, const CorpusSpec& spec);

// Fresh empty directory under the system temp dir.
std::filesystem::path FreshDir(const std::string& stem);

}  // namespace cogspeech::testing

#endif  // COGSPEECH_TESTS_SUPPORT_SYNTH_H_
