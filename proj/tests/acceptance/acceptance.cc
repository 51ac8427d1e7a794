// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check also enforces its wall-clock budget.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"
#include "cogspeech/common/text.h"
#include "cogspeech/diar/adapter.h"
#include "cogspeech/diar/grid_search.h"
#include "cogspeech/diar/metrics.h"
#include "cogspeech/dsp/filter.h"
#include "cogspeech/dsp/loudness.h"
#include "cogspeech/features/feature_sets.h"
#include "cogspeech/features/lld.h"
#include "cogspeech/model/cv.h"
#include "cogspeech/model/estimators.h"
#include "cogspeech/model/metrics.h"
#include "cogspeech/model/preprocessing.h"
#include "cogspeech/qc/qc.h"
#include "cogspeech/streams/streams.h"
#include "synth.h"

namespace cogspeech {
namespace {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Collects failed sub-checks of one criterion.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void Near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      failures_.push_back(s.str());
    }
  }
  void Note(const std::string& s) { notes_.push_back(s); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

bool RelClose(double a, double b, double rel) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------- 1
void DspAnalytics(Checks& c) {
  const dsp::FilterSpec hp = dsp::DesignHighpass(6, 100.0, 16000.0);
  c.Near(dsp::MagnitudeDb(hp, 100.0), -3.01, 0.05, "|H| at 100 Hz");
  c.Near(dsp::MagnitudeDb(hp, 50.0), -36.06, 0.5, "|H| at 50 Hz");
  c.Expect(dsp::MaxPoleRadius(hp) < 1.0, "stable poles");
  c.Note("100 Hz " + std::to_string(dsp::MagnitudeDb(hp, 100.0)) + " dB, 50 Hz " +
         std::to_string(dsp::MagnitudeDb(hp, 50.0)) + " dB");
}

// ---------------------------------------------------------------- 2
void Loudness(Checks& c) {
  const Signal x = testing::Sine(997.0, 0.1, 10.0);
  const double l = dsp::MeasureLoudness(x).integrated_lufs;
  c.Near(l, -23.0, 0.1, "997 Hz -20 dBFS sine");
  for (double start : {-35.0, -12.0}) {
    const Signal y = ApplyGainDb(x, start + 23.0);
    const dsp::NormalizedSignal n = dsp::NormalizeLoudness(y, -23.0);
    const double re = dsp::MeasureLoudness(n.signal).integrated_lufs;
    c.Near(re, -23.0, 0.2, "re-measured after normalising from " + std::to_string(start));
    const dsp::NormalizedSignal again = dsp::NormalizeLoudness(n.signal, -23.0);
    c.Near(dsp::MeasureLoudness(again.signal).integrated_lufs, re, 1e-6, "idempotent");
    c.Near(again.applied_gain_db, 0.0, 0.2, "second pass gain");
  }
  c.Note("measured " + std::to_string(l) + " LUFS");
}

// ---------------------------------------------------------------- 3
void QcBoundaries(Checks& c) {
  const qc::QcMetrics ok{20.0, -30.0, 0.0, 30.0, 0.4};
  c.Expect(qc::DecideQc(ok).overall == qc::Verdict::kPass, "comfortable metrics pass");
  qc::QcMetrics m = ok;
  m.duration_s = 15.0;
  c.Expect(!qc::DecideQc(m).duration_ok, "15.0 s fails");
  m = ok;
  m.rms_dbfs = -55.0;
  c.Expect(!qc::DecideQc(m).rms_ok, "-55.0 dBFS fails");
  m = ok;
  m.clip_ratio = 0.015;
  c.Expect(!qc::DecideQc(m).clip_ok, "0.015 clipping fails");
  m = ok;
  m.snr_db = 10.0;
  c.Expect(!qc::DecideQc(m).snr_ok, "10.0 dB SNR fails");
  m = {std::nextafter(15.0, 16.0), std::nextafter(-55.0, 0.0), std::nextafter(0.015, 0.0),
       std::nextafter(10.0, 11.0), 0.4};
  c.Expect(qc::DecideQc(m).overall == qc::Verdict::kPass, "one ulp inside passes");

  // 30 dB SNR: -50 dBFS noise floor, -20 dBFS bursts on 40% of each second.
  Signal x = testing::WhiteNoise(std::pow(10.0, -50.0 / 20.0), 10.0, 1);
  const double a = std::pow(10.0, -20.0 / 20.0) * std::sqrt(2.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    if (t - std::floor(t) < 0.4) x.samples[i] += a * std::sin(2.0 * M_PI * 440.0 * t);
  }
  const double snr = qc::EstimateSnrQuantile(x);
  c.Near(snr, 30.0, 2.0, "constructed 30 dB SNR");
  c.Note("SNR estimate " + std::to_string(snr) + " dB");
}

// ---------------------------------------------------------------- 4
void DiarOracle(Checks& c) {
  std::mt19937_64 rng(20240601);
  int mismatches = 0, invariance = 0, self = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ref = testing::RandomTimeline(rng, 5, 20, 30.0);
    const auto hyp = testing::RandomTimeline(rng, 5, 20, 30.0);
    const double collar = trial % 2 ? 0.25 : 0.0;
    const bool overlap = trial % 3 != 0;
    diar::ScoringConfig cfg;
    cfg.collar_s = collar;
    cfg.score_overlap = overlap;
    const auto s = diar::ScoreDiarization(ref, hyp, cfg);
    const auto o = testing::FrameOracle(ref, hyp, collar, overlap);
    const double der = s.der.der ? *s.der.der : std::nan("");
    const bool agree = RelClose(der, o.der, 1e-9) && RelClose(*s.jer, o.jer, 1e-9) &&
                       RelClose(*s.purity_coverage.purity(), o.purity, 1e-9) &&
                       RelClose(*s.purity_coverage.coverage(), o.coverage, 1e-9);
    mismatches += !agree;

    const auto rs = diar::ComputeDer(ref, ref, cfg);
    self += (rs.der && *rs.der != 0.0) || *diar::ComputeJer(ref, ref) != 0.0;

    std::map<std::string, std::string> rename;
    std::vector<std::string> labels = {"spk0", "spk1", "spk2", "spk3", "spk4"};
    std::vector<std::string> perm = labels;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < labels.size(); ++i) rename[labels[i]] = "x" + perm[i];
    const auto p = diar::ScoreDiarization(ref, testing::Relabel(hyp, rename), cfg);
    const double pder = p.der.der ? *p.der.der : std::nan("");
    invariance += !(RelClose(pder, der, 1e-12) && RelClose(*p.jer, *s.jer, 1e-12) &&
                    RelClose(*p.purity_coverage.purity(), *s.purity_coverage.purity(), 1e-12));
  }
  c.Expect(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  c.Expect(self == 0, std::to_string(self) + " nonzero self scores");
  c.Expect(invariance == 0, std::to_string(invariance) + " permutation-variant instances");
  c.Note("200 instances, half with a 0.25 s collar");
}

// ---------------------------------------------------------------- 5
void Streams(Checks& c) {
  std::mt19937_64 rng(5);
  int bad_len = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<corpus::Segment> segs;
    double t = 0.0;
    std::size_t total = 0;
    for (int k = 0; k < n; ++k) {
      t += 0.01 * static_cast<double>(rng() % 50);
      const double d = 0.02 + 0.01 * static_cast<double>(rng() % 100);
      segs.push_back({"PAR", t, d});
      total += static_cast<std::size_t>(std::llround(d * 16000.0));
      t += d;
    }
    const Signal x =
        testing::WhiteNoise(0.1, t + 0.01, static_cast<std::uint64_t>(trial));
    const auto r = streams::BuildConcatenated(x, corpus::Timeline(segs), "PAR");
    bad_len += r.signal.size() != total - static_cast<std::size_t>(n - 1) * 160;
  }
  c.Expect(bad_len == 0, std::to_string(bad_len) + " length-formula violations");

  Signal dc = testing::Constant(0.0, 48000);
  std::fill(dc.samples.begin(), dc.samples.begin() + 16000, 1.0);
  const auto r = streams::BuildConcatenated(
      dc, corpus::Timeline({{"PAR", 0.0, 1.0}, {"PAR", 2.0, 1.0}}), "PAR");
  c.Near(r.signal.samples[r.boundaries[0] + 80], 0.5, 1e-9, "cross-fade midpoint");

  int touched = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto tl = testing::RandomTimeline(rng, 3, 12, 10.0);
    if (tl.SegmentsOf("spk0").empty()) continue;
    const Signal x = testing::WhiteNoise(0.2, 10.0, 100 + trial);
    const Signal y = streams::BuildProsodyPreserved(x, tl, "spk0");
    std::vector<bool> masked(x.size(), false);
    for (const auto& s : tl.segments()) {
      if (s.speaker == "spk0") continue;
      const auto b = static_cast<std::size_t>(std::llround(s.onset * 16000.0));
      const auto e = std::min(x.size(), static_cast<std::size_t>(std::llround(s.end() * 16000.0)));
      for (std::size_t k = b; k < e; ++k) masked[k] = true;
    }
    for (const auto& s : tl.SegmentsOf("spk0")) {
      const auto b = static_cast<std::size_t>(std::llround(s.onset * 16000.0));
      const auto e = std::min(x.size(), static_cast<std::size_t>(std::llround(s.end() * 16000.0)));
      for (std::size_t k = b; k < e; ++k) masked[k] = false;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (masked[k]) touched += y.samples[k] != 0.0;
      else touched += y.samples[k] != x.samples[k];
    }
    touched += y.size() != x.size();
  }
  c.Expect(touched == 0, std::to_string(touched) + " samples differ from the masking rule");
}

// ---------------------------------------------------------------- 6
Signal Speechy(double dur, std::uint64_t seed) {
  Signal x = testing::Constant(0.0, static_cast<std::size_t>(dur * 16000));
  std::mt19937_64 rng(seed);
  std::size_t pos = 1600;
  while (pos + 16000 < x.size()) {
    const double f0 = 110.0 + static_cast<double>(rng() % 60);
    const Signal v = testing::Vowel(f0, 0.8, 600.0, 90.0, 1500.0, 120.0, 0.4);
    std::copy(v.samples.begin(), v.samples.end(), x.samples.begin() + static_cast<long>(pos));
    pos += v.size() + 3200 + rng() % 3200;
  }
  return x;
}

void Features(Checks& c) {
  const auto f0 = features::TrackF0(testing::Sine(200.0, 0.5, 2.0));
  std::size_t near = 0;
  for (std::size_t i = 0; i < f0.values.size(); ++i) {
    near += f0.valid[i] && std::abs(f0.values[i] - 200.0) <= 1.0;
  }
  const double frac = static_cast<double>(near) / static_cast<double>(f0.values.size());
  c.Expect(frac >= 0.95, "F0 within 1 Hz on " + std::to_string(frac) + " of frames");

  const Signal pulses =
      testing::Resonate(testing::PulseTrain({99.0, 101.0}, 32000), 500.0, 200.0);
  const auto vq = features::JitterShimmerHnr(pulses, features::TrackF0(pulses));
  const double jitter = vq.jitter.ValidCount() ? Mean(vq.jitter.ValidValues()) : std::nan("");
  c.Near(jitter, 0.02, 0.005, "planted 2% jitter");

  const Signal vowel = testing::Vowel(120.0, 2.0, 500.0, 80.0, 1500.0, 120.0);
  const auto tracks = features::FormantBandwidths(vowel, features::TrackF0(vowel));
  const double f1 = tracks.f1_hz.ValidCount() ? Quantile(tracks.f1_hz.ValidValues(), 0.5) : 0.0;
  const double f2 = tracks.f2_hz.ValidCount() ? Quantile(tracks.f2_hz.ValidValues(), 0.5) : 0.0;
  c.Near(f1, 500.0, 25.0, "F1");
  c.Near(f2, 1500.0, 75.0, "F2");

  int gain_violations = 0;
  for (double g : {-12.0, -3.7, 4.1}) {
    const Signal x = Speechy(6.0, 11);
    const Signal y = ApplyGainDb(x, g);
    const auto a = features::ExtractFeatureSets(&x, &x);
    const auto b = features::ExtractFeatureSets(&y, &y);
    if (a.all.values.size() != b.all.values.size()) {
      ++gain_violations;
      continue;
    }
    for (std::size_t i = 0; i < a.all.values.size(); ++i) {
      const auto& [name, va] = a.all.values[i];
      const double vb = b.all.values[i].second;
      const bool ok = name == "egx.level_db_mean"
                          ? std::abs((vb - va) - g) <= 1e-6
                          : std::abs(vb - va) <= 1e-6 * std::max(std::abs(va), std::abs(vb)) + 1e-9;
      if (!ok) {
        ++gain_violations;
        c.Note("gain " + std::to_string(g) + " moves " + name);
      }
    }
  }
  c.Expect(gain_violations == 0, std::to_string(gain_violations) + " gain-invariance violations");
  c.Note("jitter " + std::to_string(jitter) + ", F1 " + std::to_string(f1) + ", F2 " +
         std::to_string(f2));
}

// ---------------------------------------------------------------- 7
void Models(Checks& c) {
  MatrixXd x(3, 1);
  x << 0, 1, 2;
  VectorXd y(3);
  y << 1, 2, 2;
  MatrixXd a(3, 2);
  a << 0, 1, 1, 1, 2, 1;
  MatrixXd reg = MatrixXd::Zero(2, 2);
  reg(0, 0) = 1.0;
  const VectorXd sol = (a.transpose() * a + reg).ldlt().solve(a.transpose() * y);
  const auto m = model::RidgeFit(x, y, 1.0);
  c.Near(m.w(0), sol(0), 1e-9, "3-point w");
  c.Near(m.b, sol(1), 1e-9, "3-point b");

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 199), d = 1 + static_cast<int>(rng() % 50);
    MatrixXd xr(n, d);
    VectorXd yr(n);
    for (int i = 0; i < n; ++i) {
      yr(i) = g(rng);
      for (int j = 0; j < d; ++j) xr(i, j) = g(rng);
    }
    const double lambda = 0.5 + static_cast<double>(trial % 5);
    MatrixXd aug(n, d + 1);
    aug << xr, VectorXd::Ones(n);
    MatrixXd h = aug.transpose() * aug;
    h.topLeftCorner(d, d).diagonal().array() += lambda;
    const VectorXd oracle = h.ldlt().solve(aug.transpose() * yr);
    const auto fit = model::RidgeFit(xr, yr, lambda);
    worst = std::max(worst, (fit.w - oracle.head(d)).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(fit.b - oracle(d)));
  }
  c.Expect(worst <= 1e-6, "random ridge max error " + std::to_string(worst));

  double pca_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd xp(80, 5);
    for (int i = 0; i < 80; ++i) {
      for (int j = 0; j < 5; ++j) xp(i, j) = g(rng) * (1.0 + j);
    }
    const auto p = model::PcaFit(xp, model::PcaMode::Variance(0.95));
    const MatrixXd cen = xp.rowwise() - xp.colwise().mean();
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(cen.transpose() * cen);
    const VectorXd ev = es.eigenvalues().reverse();
    int k = 0;
    double cum = 0.0;
    while (k < 5 && cum < 0.95 * ev.sum()) cum += ev(k++);
    if (p.kept() != k) {
      pca_err = 1.0;
      break;
    }
    const MatrixXd proj = p.Apply(xp);
    for (int j = 0; j < k; ++j) {
      const VectorXd o = cen * es.eigenvectors().col(4 - j);
      const double s = o.dot(proj.col(j)) >= 0.0 ? 1.0 : -1.0;
      pca_err = std::max(pca_err, (proj.col(j) - s * o).cwiseAbs().maxCoeff());
    }
  }
  c.Expect(pca_err <= 1e-8, "PCA max error " + std::to_string(pca_err));

  MatrixXd xb(80, 2);
  VectorXd yb(80);
  for (int i = 0; i < 80; ++i) {
    const double s = i < 40 ? 1.0 : -1.0;
    xb(i, 0) = 2.0 * s + 0.5 * g(rng);
    xb(i, 1) = s + 0.5 * g(rng);
    yb(i) = s;
  }
  const auto svm = model::LinearSvmFit(xb, yb, {});
  const VectorXd pred = svm.model.Decision(xb).unaryExpr([](double v) { return v > 0 ? 1.0 : -1.0; });
  const auto ba = model::BalancedAccuracy(yb, pred);
  c.Expect(ba && *ba == 1.0, "separable blobs training ba");
}

// ------------------------------------------------------ CLI helpers
int Cli(const std::vector<std::string>& args, std::string* err_out = nullptr) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------- 8
void HarnessIntegrity(Checks& c, const fs::path& dir) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const int subjects = 100, d = 6;
  MatrixXd x(subjects, d);
  VectorXd y(subjects);
  model::Dataset ds;
  for (int i = 0; i < subjects; ++i) {
    double v = 0.0;
    for (int j = 0; j < d; ++j) {
      x(i, j) = g(rng);
      v += x(i, j) * (1.0 - 0.15 * j);
    }
    y(i) = v + 0.3 * g(rng);
    ds.session_ids.push_back("sess" + std::to_string(i));
    ds.subject_ids.push_back("subj" + std::to_string(i));
  }
  for (int j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  ds.x = x;
  ds.y = y;
  ds.target = model::MakeTarget(1, "mmse");

  model::LeakageAuditor auditor;
  const auto plan = model::MakeFoldPlan(model::SubjectsOf(ds), 5, 3, 1);
  const auto reg = model::NestedCv(ds, model::DefaultPipelineGrid(model::TargetKind::kRegression),
                                   plan, {}, &auditor);
  c.Expect(auditor.size() > 0 && auditor.Violations().empty(),
           std::to_string(auditor.Violations().size()) + " leaking fits of " +
               std::to_string(auditor.size()));
  c.Expect(reg.mean >= 0.9, "planted outer mean r " + std::to_string(reg.mean));

  // Ten label permutations: the mean of their outer balanced accuracies has
  // a standard error near 0.015 when nothing leaks.
  model::Dataset perm = ds;
  perm.target = model::MakeTarget(3, "mci");
  std::vector<double> labels(subjects);
  for (int i = 0; i < subjects; ++i) labels[i] = i % 2;
  std::vector<double> perm_ba;
  std::size_t perm_violations = 0;
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < subjects; ++i) perm.y(i) = labels[i];
    model::LeakageAuditor a;
    const auto cls = model::NestedCv(
        perm, model::DefaultPipelineGrid(model::TargetKind::kClassification),
        model::MakeFoldPlan(model::SubjectsOf(perm), 5, 3, 2 + rep), {}, &a);
    perm_violations += a.Violations().size();
    perm_ba.push_back(cls.mean);
  }
  const double perm_mean = Mean(perm_ba);
  c.Expect(perm_violations == 0, "classification leakage");
  c.Near(perm_mean, 0.5, 0.1, "permuted-label balanced accuracy");
  std::string per;
  for (double v : perm_ba) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s%.2f", per.empty() ? "" : " ", v);
    per += buf;
  }

  // Same data through the CLI with different --jobs.
  fs::create_directories(dir);
  std::ofstream feat(dir / "features.csv"), man(dir / "manifest.csv");
  feat << "session_id";
  for (const auto& n : ds.feature_names) feat << "," << n;
  feat << "\n";
  man << "session_id,subject_id,group,task,split,audio_path,sample_rate,mmse,participant\n";
  for (int i = 0; i < subjects; ++i) {
    feat << ds.session_ids[i];
    for (int j = 0; j < d; ++j) feat << "," << FormatDouble(x(i, j));
    feat << "\n";
    const int mmse = std::clamp(static_cast<int>(std::lround(20.0 + 3.0 * y(i))), 0, 30);
    man << ds.session_ids[i] << "," << ds.subject_ids[i] << "," << (mmse >= 24 ? "hc" : "mci")
        << ",mmse,development,none.wav,16000," << mmse << ",PAR\n";
  }
  feat.close();
  man.close();
  std::string err;
  std::vector<std::string> outs;
  for (const char* jobs : {"1", "3"}) {
    const fs::path out = dir / (std::string("cv_jobs") + jobs + ".json");
    const int code = Cli({"--jobs", jobs, "--seed", "17", "cv", "--features",
                          (dir / "features.csv").string(), "--manifest",
                          (dir / "manifest.csv").string(), "--target", "1:mmse", "--out",
                          out.string()},
                         &err);
    c.Expect(code == 0, std::string("cv --jobs ") + jobs + " exit " + std::to_string(code) + ": " + err);
    outs.push_back(Slurp(out));
  }
  c.Expect(!outs[0].empty() && outs[0] == outs[1], "CvReport differs between --jobs 1 and 3");
  c.Note("outer r " + std::to_string(reg.mean) + ", permuted ba " + std::to_string(perm_mean) +
         " [" + per + "], " + std::to_string(auditor.size()) + " audited regression fits");
}

// ---------------------------------------------------------------- 9
void EndToEnd(Checks& c, const fs::path& dir) {
  testing::CorpusSpec spec;
  spec.subjects = 20;
  spec.holdout_subjects = 6;
  spec.duration_s = 20.0;
  const auto corpus = testing::WriteCorpus(dir / "corpus", spec);
  const std::string m = corpus.manifest.string();
  auto p = [&](const std::string& s) { return (dir / s).string(); };
  std::string err;
  auto step = [&](const std::string& name, const std::vector<std::string>& args) {
    const int code = Cli(args, &err);
    c.Expect(code == 0, name + " exit " + std::to_string(code) + ": " + err);
    return code == 0;
  };
  if (!step("qc", {"qc", "--manifest", m, "--out", p("qc.jsonl")})) return;
  if (!step("preprocess", {"preprocess", "--manifest", m, "--out-dir", p("pre")})) return;
  if (!step("streams", {"streams", "--manifest", m, "--rttm-dir", corpus.rttm_dir.string(),
                        "--audio-dir", p("pre"), "--out-dir", p("streams")})) {
    return;
  }
  if (!step("features", {"features", "--manifest", m, "--streams-dir", p("streams"), "--qc",
                         p("qc.jsonl"), "--out", p("features.csv")})) {
    return;
  }
  if (!step("cv", {"cv", "--features", p("features.csv"), "--manifest", m, "--target", "1:mmse",
                   "--task", "mmse", "--feature-set", "EG_ALL", "--out", p("cv.json")})) {
    return;
  }
  if (!step("holdout", {"holdout", "--features", p("features.csv"), "--manifest", m,
                        "--cv-report", p("cv.json"), "--out", p("holdout.json")})) {
    return;
  }
  if (!step("report", {"report", "--cv", p("cv.json"), "--holdout", p("holdout.json"),
                       "--out-dir", p("report")})) {
    return;
  }
  const model::CvReport cv = model::ParseCvReport(Slurp(p("cv.json")));
  const double dev = cv.mean;
  const double hov = model::ParseHoldout(Slurp(p("holdout.json"))).first.value;
  c.Near(hov, dev, 0.15, "holdout r vs dev outer mean");
  const std::string table = Slurp(p("report/hierarchy.csv"));
  c.Expect(table.rfind("level_target,input_test,feature,metric,dev,ho\n", 0) == 0,
           "hierarchy table header");
  c.Expect(table.find("L1 mmse,") != std::string::npos &&
               table.find(",EG_ALL,pearson_r,") != std::string::npos,
           "hierarchy row: " + table);
  c.Expect(fs::exists(p("report/levels.csv")), "level chart data");
  c.Note("dev r " + std::to_string(dev) + " +- " + std::to_string(cv.sd) +
         ", holdout r " + std::to_string(hov));
}

// --------------------------------------------------------------- 10
std::vector<diar::DiarSession> GridSessions() {
  std::vector<diar::DiarSession> out;
  for (int i = 0; i < 6; ++i) {
    diar::DiarSession s;
    s.session_id = "g" + std::to_string(i);
    s.subject_id = "p" + std::to_string(i);
    s.audio = testing::Mix(testing::WhiteNoise(0.001, 2.5, 50 + i),
                           testing::Sine(180.0 + 10.0 * i, 0.2, 2.5));
    // Turns well beyond twice the collar so most of each is scored.
    s.reference = corpus::Timeline({{"PAR", 0.1, 1.0}, {"INV", 1.3, 1.1}});
    out.push_back(std::move(s));
  }
  return out;
}

// All turns under one label: the examiner's time becomes confusion.
corpus::Timeline Degrade(const corpus::Timeline& t) {
  std::vector<corpus::Segment> segs;
  for (const auto& s : t.segments()) segs.push_back({"PAR", s.onset, s.duration});
  return corpus::Timeline(segs);
}

void GridSearch(Checks& c) {
  diar::FunctionAdapter adapter([](const diar::DiarRequest& r) {
    const auto it = r.params.find("diarizer.mode");
    if (it != r.params.end() && it->second == "degraded") return Degrade(r.session.reference);
    return r.session.reference;
  });
  const auto sessions = GridSessions();
  diar::GridSearchOptions opt;

  const auto two = diar::ParseGridSchema(R"({"diarizer.mode": ["degraded", "identity"]})");
  const auto r2 = diar::RunGridSearch(two, sessions, adapter, opt);
  c.Expect(r2.ranked.size() == 2 && r2.ranked[0].index == 1, "identity point ranks first");
  c.Near(r2.ranked[0].tuning.der, 0.0, 0.0, "identity tuning DER");
  c.Expect(r2.ranked[0].validation && r2.ranked[0].validation->der == 0.0,
           "identity validation DER");

  const auto big = diar::ParseGridSchema(R"({
      "diarizer.mode": ["degraded", "identity"],
      "gate.alpha": [0.1, 0.2, 0.3, 0.4, 0.5],
      "highpass.cutoff_hz": [60, 70, 80, 90, 100, 110, 120],
      "highpass.order": [2, 4, 6],
      "loudness.target_lufs": [-20, -23, -26],
      "output_gain_db": [0, -1, -2, -3]})");
  c.Expect(big.Size() == 2520, "grid size " + std::to_string(big.Size()));
  const auto a = diar::RunGridSearch(big, sessions, adapter, opt);
  opt.jobs = 4;
  const auto b = diar::RunGridSearch(big, sessions, adapter, opt);
  c.Expect(a.ranked.size() == 2520 && a.failed_count == 0, "all 2520 points scored");
  c.Expect(diar::GridResultsToCsv(big, a) == diar::GridResultsToCsv(big, b),
           "ranking differs between runs");
  bool split = true;
  for (std::size_t i = 0; i < a.ranked.size(); ++i) {
    const bool identity = a.ranked[i].point[0].second == "identity";
    split &= identity == (i < 1260);
  }
  c.Expect(split, "every identity point outranks every degraded point");
  // The first key varies slowest, so identity points are indices 1260 onward.
  c.Expect(a.ranked[0].index == 1260 && a.ranked[1].index == 1261,
           "ties resolved toward the lowest index");
  c.Note("2520 points x " + std::to_string(sessions.size()) + " sessions, twice");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Checks&)> run;
};

}  // namespace
}  // namespace cogspeech

int main() {
  using namespace cogspeech;
  const fs::path work = testing::FreshDir("acceptance");
  const std::vector<Criterion> criteria = {
      {1, "DSP analytics", 1.0, DspAnalytics},
      {2, "Loudness", 1.0, Loudness},
      {3, "QC boundaries", 5.0, QcBoundaries},
      {4, "Diarization metric oracle", 30.0, DiarOracle},
      {5, "Streams", 10.0, Streams},
      {6, "Features", 60.0, Features},
      {7, "Models", 30.0, Models},
      {8, "Harness integrity", 300.0, [&](Checks& c) { HarnessIntegrity(c, work / "c8"); }},
      {9, "End-to-end rehearsal", 600.0, [&](Checks& c) { EndToEnd(c, work / "c9"); }},
      {10, "Grid-search harness", 600.0, GridSearch},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.Expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char budget[96];
    std::snprintf(budget, sizeof budget, "took %.2f s, budget %.0f s", secs, cr.budget_s);
    c.Expect(secs < cr.budget_s, budget);
    const bool pass = c.failures().empty();
    failed += !pass;
    std::printf("criterion %2d %-28s %s (%.2f s / %.0f s)", cr.id, cr.name, pass ? "PASS" : "FAIL",
                secs, cr.budget_s);
    for (const auto& n : c.notes()) std::printf("; %s", n.c_str());
    std::printf("\n");
    for (const auto& f : c.failures()) std::printf("    - %s\n", f.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
