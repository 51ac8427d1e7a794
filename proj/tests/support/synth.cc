#include "synth.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

#include "cogspeech/corpus/rttm.h"
#include "cogspeech/dsp/wav.h"

namespace cogspeech::testing {

namespace fs = std::filesystem;
using corpus::Segment;
using corpus::Timeline;

Signal Sine(double freq_hz, double amplitude, double duration_s, double fs, double phase) {
  Signal x;
  x.sample_rate = fs;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  x.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.samples[i] =
        amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

Signal WhiteNoise(double rms, double duration_s, std::uint64_t seed, double fs) {
  Signal x;
  x.sample_rate = fs;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, rms);
  x.samples.resize(static_cast<std::size_t>(std::llround(duration_s * fs)));
  for (double& v : x.samples) v = g(rng);
  return x;
}

Signal Constant(double value, std::size_t n, double fs) {
  Signal x;
  x.sample_rate = fs;
  x.samples.assign(n, value);
  return x;
}

Signal Mix(const Signal& a, const Signal& b) {
  Signal out = a.size() >= b.size() ? a : b;
  const Signal& other = a.size() >= b.size() ? b : a;
  for (std::size_t i = 0; i < other.size(); ++i) out.samples[i] += other.samples[i];
  return out;
}

double Rms(const Signal& x) {
  double s = 0.0;
  for (double v : x.samples) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

Signal PulseTrain(const std::vector<double>& periods, std::size_t n, double fs) {
  Signal x = Constant(0.0, n, fs);
  double pos = 0.0;
  std::size_t k = 0;
  while (!periods.empty()) {
    const auto i = static_cast<std::size_t>(std::llround(pos));
    if (i >= n) break;
    x.samples[i] = 1.0;
    pos += periods[k % periods.size()];
    ++k;
  }
  return x;
}

Signal Resonate(const Signal& x, double f_hz, double bw_hz) {
  const double fs = x.sample_rate;
  const double r = std::exp(-std::numbers::pi * bw_hz / fs);
  const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f_hz / fs);
  const double a2 = -r * r;
  Signal y = x;
  double y1 = 0.0, y2 = 0.0;
  for (double& v : y.samples) {
    const double out = v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = out;
    v = out;
  }
  return y;
}

Signal Vowel(double f0_hz, double duration_s, double f1, double bw1, double f2, double bw2,
             double peak, double fs) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  Signal x = Resonate(Resonate(PulseTrain({fs / f0_hz}, n, fs), f1, bw1), f2, bw2);
  double m = 0.0;
  for (double v : x.samples) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (double& v : x.samples) v *= peak / m;
  }
  return x;
}

Timeline RandomTimeline(std::mt19937_64& rng, int max_speakers, int max_segments, double total_s,
                        double grid_s) {
  const int n_spk = std::uniform_int_distribution<int>(1, max_speakers)(rng);
  const int n_seg = std::uniform_int_distribution<int>(1, max_segments)(rng);
  const auto cells = static_cast<long long>(std::llround(total_s / grid_s));
  std::vector<std::vector<std::pair<long long, long long>>> taken(n_spk);
  std::vector<Segment> segs;
  for (int s = 0, attempts = 0; s < n_seg && attempts < 1000; ++attempts) {
    const int spk = std::uniform_int_distribution<int>(0, n_spk - 1)(rng);
    const long long on = std::uniform_int_distribution<long long>(0, cells - 2)(rng);
    const long long len =
        std::uniform_int_distribution<long long>(1, std::min(300LL, cells - on))(rng);
    bool clash = false;
    for (const auto& [a, b] : taken[spk]) clash |= on < b && a < on + len;
    if (clash) continue;
    taken[spk].emplace_back(on, on + len);
    segs.push_back({"spk" + std::to_string(spk), static_cast<double>(on) * grid_s,
                    static_cast<double>(len) * grid_s});
    ++s;
  }
  return Timeline(std::move(segs));
}

Timeline Relabel(const Timeline& tl, const std::map<std::string, std::string>& rename) {
  std::vector<Segment> segs = tl.segments();
  for (auto& s : segs) s.speaker = rename.at(s.speaker);
  return Timeline(std::move(segs));
}

namespace {

struct Active {
  std::vector<std::string> names;
  // frames x speakers
  std::vector<std::vector<char>> on;
};

Active Rasterize(const Timeline& tl, std::size_t frames, double h) {
  Active a;
  a.names = tl.Speakers();
  a.on.assign(frames, std::vector<char>(a.names.size(), 0));
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    for (const auto& s : tl.segments()) {
      if (t >= s.onset && t < s.end()) {
        const auto j = std::find(a.names.begin(), a.names.end(), s.speaker) - a.names.begin();
        a.on[k][j] = 1;
      }
    }
  }
  return a;
}

// Best total of w[i][m(i)] over partial one-to-one maps rows -> cols.
double BestPartialMapping(const std::vector<std::vector<double>>& w, std::size_t cols,
                          const std::function<double(const std::vector<int>&)>& score) {
  std::vector<int> m(w.size(), -1);
  std::vector<char> used(cols, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == w.size()) {
      best = std::max(best, score(m));
      return;
    }
    m[i] = -1;
    rec(i + 1);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      m[i] = static_cast<int>(c);
      rec(i + 1);
      used[c] = 0;
    }
    m[i] = -1;
  };
  rec(0);
  return best;
}

}  // namespace

FrameScores FrameOracle(const Timeline& ref, const Timeline& hyp, double collar_s,
                        bool score_overlap, double h) {
  double end = 0.0;
  for (const auto& s : ref.segments()) end = std::max(end, s.end());
  for (const auto& s : hyp.segments()) end = std::max(end, s.end());
  const auto frames = static_cast<std::size_t>(std::ceil(end / h)) + 1;
  const Active r = Rasterize(ref, frames, h);
  const Active y = Rasterize(hyp, frames, h);
  const std::size_t nr = r.names.size(), ny = y.names.size();

  std::vector<double> bounds;
  for (const auto& s : ref.segments()) {
    bounds.push_back(s.onset);
    bounds.push_back(s.end());
  }

  double scored = 0.0, errors_fixed = 0.0, min_sum = 0.0;
  std::vector<std::vector<double>> co(ny, std::vector<double>(nr, 0.0));
  std::vector<std::vector<double>> co_all(ny, std::vector<double>(nr, 0.0));
  std::vector<double> ref_len(nr, 0.0), hyp_len(ny, 0.0);
  std::vector<std::vector<double>> uni(nr, std::vector<double>(ny, 0.0));
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    int cr = 0, cy = 0;
    for (std::size_t j = 0; j < nr; ++j) cr += r.on[k][j];
    for (std::size_t i = 0; i < ny; ++i) cy += y.on[k][i];
    for (std::size_t j = 0; j < nr; ++j) ref_len[j] += r.on[k][j] * h;
    for (std::size_t i = 0; i < ny; ++i) hyp_len[i] += y.on[k][i] * h;
    for (std::size_t i = 0; i < ny; ++i) {
      for (std::size_t j = 0; j < nr; ++j) {
        if (y.on[k][i] && r.on[k][j]) co_all[i][j] += h;
        if (y.on[k][i] || r.on[k][j]) uni[j][i] += h;
      }
    }
    bool in_collar = false;
    for (double b : bounds) in_collar |= std::abs(t - b) <= collar_s;
    if (collar_s > 0.0 && in_collar) continue;
    if (!score_overlap && cr > 1) continue;
    scored += cr * h;
    errors_fixed += std::abs(cr - cy) * h;
    min_sum += std::min(cr, cy) * h;
    for (std::size_t i = 0; i < ny; ++i) {
      for (std::size_t j = 0; j < nr; ++j) {
        if (y.on[k][i] && r.on[k][j]) co[i][j] += h;
      }
    }
  }

  FrameScores out;
  const double correct = BestPartialMapping(co, nr, [&](const std::vector<int>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] >= 0) s += co[i][m[i]];
    }
    return s;
  });
  out.der = scored > 0.0 ? (errors_fixed + min_sum - correct) / scored
                         : std::numeric_limits<double>::quiet_NaN();

  if (nr == 0) {
    out.jer = std::numeric_limits<double>::quiet_NaN();
  } else {
    // Rows are reference speakers here.
    std::vector<std::vector<double>> jw(nr, std::vector<double>(ny, 0.0));
    const double best = BestPartialMapping(jw, ny, [&](const std::vector<int>& m) {
      double jsum = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] >= 0 && uni[j][m[j]] > 0.0) jsum += co_all[m[j]][j] / uni[j][m[j]];
      }
      return jsum;
    });
    out.jer = 1.0 - best / static_cast<double>(nr);
  }

  double pur = 0.0, cov = 0.0, hyp_total = 0.0, ref_total = 0.0;
  for (std::size_t i = 0; i < ny; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < nr; ++j) m = std::max(m, co_all[i][j]);
    pur += m;
    hyp_total += hyp_len[i];
  }
  for (std::size_t j = 0; j < nr; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < ny; ++i) m = std::max(m, co_all[i][j]);
    cov += m;
    ref_total += ref_len[j];
  }
  out.purity = hyp_total > 0.0 ? pur / hyp_total : std::numeric_limits<double>::quiet_NaN();
  out.coverage = ref_total > 0.0 ? cov / ref_total : std::numeric_limits<double>::quiet_NaN();
  return out;
}

fs::path FreshDir(const std::string& stem) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     ("cogspeech_test_" + stem + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CorpusFiles WriteCorpus(const fs::path& dir, const CorpusSpec& spec) {
  CorpusFiles out;
  out.dir = dir;
  out.rttm_dir = dir / "rttm";
  fs::create_directories(dir / "audio");
  fs::create_directories(out.rttm_dir);
  std::mt19937_64 rng(spec.seed);

  std::vector<int> order(spec.subjects);
  for (int i = 0; i < spec.subjects; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::set<int> holdout(order.begin(), order.begin() + spec.holdout_subjects);

  std::ostringstream manifest;
  manifest << "session_id,subject_id,group,task,split,audio_path,sample_rate,mmse,participant\n";
  const double fs = spec.fs;
  for (int i = 0; i < spec.subjects; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "S%03d", i);
    const std::string sid = std::string(id) + "_mmse";
    const double mmse = std::uniform_int_distribution<int>(10, 30)(rng);
    const double f0 = 90.0 + 4.0 * mmse + std::normal_distribution<double>(0.0, 2.0)(rng);

    // Examiner and participant turns separated by 1 s of background noise.
    std::vector<Segment> segs;
    double t = spec.lead_in_s + 0.5;
    bool examiner = true;
    while (true) {
      const double len = examiner ? 2.0 : 4.0;
      if (t + len > spec.duration_s - 0.5) break;
      segs.push_back({examiner ? "INV" : "PAR", t, len});
      t += len + 1.0;
      examiner = !examiner;
    }
    const Timeline tl(segs);

    const double dur = spec.duration_s;
    const Signal par = Vowel(f0, dur, 600.0, 90.0, 1500.0, 120.0, 0.5, fs);
    const Signal inv = Vowel(230.0, dur, 500.0, 80.0, 1700.0, 120.0, 0.5, fs);
    Signal x = WhiteNoise(0.001, dur, spec.seed * 1000 + static_cast<std::uint64_t>(i), fs);
    const double ramp = 0.01 * fs;
    for (const auto& s : tl.segments()) {
      const Signal& v = s.speaker == "PAR" ? par : inv;
      const auto b = static_cast<std::size_t>(std::llround(s.onset * fs));
      const auto e = static_cast<std::size_t>(std::llround(s.end() * fs));
      for (std::size_t k = b; k < e && k < x.size(); ++k) {
        const double tt = static_cast<double>(k) / fs;
        double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * 3.0 * tt);
        const double edge = std::min(static_cast<double>(k - b), static_cast<double>(e - k));
        if (edge < ramp) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * edge / ramp);
        x.samples[k] += env * v.samples[k];
      }
    }
    dsp::WriteWav(dir / "audio" / (sid + ".wav"), x, dsp::WavFormat::kFloat32);
    corpus::WriteRttmFile(out.rttm_dir / (sid + ".rttm"), tl, sid);

    manifest << sid << "," << id << "," << (mmse >= 24 ? "hc" : "mci") << ",mmse,"
             << (holdout.count(i) ? "holdout" : "development") << ",audio/" << sid << ".wav,"
             << fs << "," << mmse << ",PAR\n";
    out.session_ids.push_back(sid);
    out.mmse.push_back(mmse);
  }
  out.manifest = dir / "manifest.csv";
  std::ofstream(out.manifest) << manifest.str();
  return out;
}

}  // namespace cogspeech::testing
