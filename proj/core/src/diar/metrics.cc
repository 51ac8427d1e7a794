#include "cogspeech/diar/metrics.h"

#include <algorithm>
#include <utility>
#include <vector>

#include "cogspeech/diar/assignment.h"

namespace cogspeech::diar {
namespace {

using Interval = std::pair<double, double>;
using Intervals = std::vector<Interval>;

struct SpeakerTrack {
  std::string speaker;
  Intervals intervals;  // sorted, disjoint

  double Total() const {
    double t = 0.0;
    for (const auto& [s, e] : intervals) t += e - s;
    return t;
  }
  bool Contains(double t) const {
    auto it = std::upper_bound(
        intervals.begin(), intervals.end(), t,
        [](double v, const Interval& iv) { return v < iv.first; });
    if (it == intervals.begin()) return false;
    --it;
    return t >= it->first && t < it->second;
  }
};

Intervals Merge(Intervals iv) {
  std::sort(iv.begin(), iv.end());
  Intervals out;
  for (const Interval& x : iv) {
    if (!out.empty() && x.first <= out.back().second) {
      out.back().second = std::max(out.back().second, x.second);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<SpeakerTrack> Tracks(const Timeline& tl) {
  std::vector<SpeakerTrack> tracks;
  for (const std::string& spk : tl.Speakers()) {
    Intervals iv;
    for (const auto& seg : tl.SegmentsOf(spk)) iv.emplace_back(seg.onset, seg.end());
    tracks.push_back({spk, Merge(std::move(iv))});
  }
  return tracks;
}

double IntersectLength(const Intervals& a, const Intervals& b) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second) ++i; else ++j;
  }
  return total;
}

std::vector<std::vector<double>> OverlapMatrix(
    const std::vector<SpeakerTrack>& rows, const std::vector<SpeakerTrack>& cols) {
  std::vector<std::vector<double>> m(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      m[i][j] = IntersectLength(rows[i].intervals, cols[j].intervals);
  return m;
}

}  // namespace

double SpeakerOverlap(const Timeline& a, const std::string& speaker_a,
                      const Timeline& b, const std::string& speaker_b) {
  Intervals ia, ib;
  for (const auto& s : a.SegmentsOf(speaker_a)) ia.emplace_back(s.onset, s.end());
  for (const auto& s : b.SegmentsOf(speaker_b)) ib.emplace_back(s.onset, s.end());
  return IntersectLength(Merge(std::move(ia)), Merge(std::move(ib)));
}

SpeakerMapping OptimalSpeakerMapping(const Timeline& ref, const Timeline& hyp) {
  const auto ref_tracks = Tracks(ref);
  const auto hyp_tracks = Tracks(hyp);
  const auto overlap = OverlapMatrix(hyp_tracks, ref_tracks);
  const std::vector<int> assign = MaxWeightAssignment(overlap);
  SpeakerMapping mapping;
  for (std::size_t h = 0; h < assign.size(); ++h) {
    if (assign[h] >= 0 && overlap[h][assign[h]] > 0.0) {
      mapping[hyp_tracks[h].speaker] = ref_tracks[assign[h]].speaker;
    }
  }
  return mapping;
}

DerBreakdown ComputeDer(const Timeline& ref, const Timeline& hyp,
                        const ScoringConfig& cfg) {
  const auto ref_tracks = Tracks(ref);
  const auto hyp_tracks = Tracks(hyp);

  Intervals zones;
  if (cfg.collar_s > 0.0) {
    for (const auto& s : ref.segments()) {
      zones.emplace_back(s.onset - cfg.collar_s, s.onset + cfg.collar_s);
      zones.emplace_back(s.end() - cfg.collar_s, s.end() + cfg.collar_s);
    }
    zones = Merge(std::move(zones));
  }
  const SpeakerTrack collar{"", zones};

  std::vector<double> cuts;
  for (const auto* tracks : {&ref_tracks, &hyp_tracks}) {
    for (const auto& t : *tracks) {
      for (const auto& [s, e] : t.intervals) {
        cuts.push_back(s);
        cuts.push_back(e);
      }
    }
  }
  for (const auto& [s, e] : zones) {
    cuts.push_back(s);
    cuts.push_back(e);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Piece {
    double dt;
    std::vector<int> refs;
    std::vector<int> hyps;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = cuts[k], t1 = cuts[k + 1];
    const double mid = 0.5 * (t0 + t1);
    if (collar.Contains(mid)) continue;
    Piece p{t1 - t0, {}, {}};
    for (std::size_t i = 0; i < ref_tracks.size(); ++i)
      if (ref_tracks[i].Contains(mid)) p.refs.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < hyp_tracks.size(); ++j)
      if (hyp_tracks[j].Contains(mid)) p.hyps.push_back(static_cast<int>(j));
    if (p.refs.empty() && p.hyps.empty()) continue;
    if (!cfg.score_overlap && p.refs.size() > 1) continue;
    pieces.push_back(std::move(p));
  }

  std::vector<std::vector<double>> overlap(
      hyp_tracks.size(), std::vector<double>(ref_tracks.size(), 0.0));
  for (const Piece& p : pieces)
    for (int h : p.hyps)
      for (int r : p.refs) overlap[h][r] += p.dt;
  const std::vector<int> assign = MaxWeightAssignment(overlap);

  DerBreakdown out;
  std::vector<int> mapped(hyp_tracks.size(), -1);
  for (std::size_t h = 0; h < assign.size(); ++h) {
    if (assign[h] >= 0 && overlap[h][assign[h]] > 0.0) {
      mapped[h] = assign[h];
      out.mapping[hyp_tracks[h].speaker] = ref_tracks[assign[h]].speaker;
    }
  }
  for (const Piece& p : pieces) {
    const auto n_ref = static_cast<double>(p.refs.size());
    const auto n_hyp = static_cast<double>(p.hyps.size());
    double n_correct = 0.0;
    for (int h : p.hyps) {
      if (mapped[h] >= 0 &&
          std::find(p.refs.begin(), p.refs.end(), mapped[h]) != p.refs.end()) {
        n_correct += 1.0;
      }
    }
    out.scored_total_s += n_ref * p.dt;
    out.missed_s += std::max(0.0, n_ref - n_hyp) * p.dt;
    out.false_alarm_s += std::max(0.0, n_hyp - n_ref) * p.dt;
    out.confusion_s += (std::min(n_ref, n_hyp) - n_correct) * p.dt;
  }
  if (out.scored_total_s > 0.0) out.der = out.errors_s() / out.scored_total_s;
  return out;
}

std::optional<double> ComputeJer(const Timeline& ref, const Timeline& hyp) {
  const auto ref_tracks = Tracks(ref);
  if (ref_tracks.empty()) return std::nullopt;
  const auto hyp_tracks = Tracks(hyp);
  const auto inter = OverlapMatrix(ref_tracks, hyp_tracks);
  std::vector<std::vector<double>> jaccard(
      ref_tracks.size(), std::vector<double>(hyp_tracks.size(), 0.0));
  for (std::size_t r = 0; r < ref_tracks.size(); ++r) {
    const double ref_total = ref_tracks[r].Total();
    for (std::size_t h = 0; h < hyp_tracks.size(); ++h) {
      const double uni = ref_total + hyp_tracks[h].Total() - inter[r][h];
      jaccard[r][h] = uni > 0.0 ? inter[r][h] / uni : 0.0;
    }
  }
  const std::vector<int> assign = MaxWeightAssignment(jaccard);
  double sum = 0.0;
  for (std::size_t r = 0; r < ref_tracks.size(); ++r) {
    const double j = assign[r] >= 0 ? jaccard[r][assign[r]] : 0.0;
    sum += 1.0 - j;
  }
  return sum / static_cast<double>(ref_tracks.size());
}

PurityCoverage ComputePurityCoverage(const Timeline& ref, const Timeline& hyp) {
  const auto ref_tracks = Tracks(ref);
  const auto hyp_tracks = Tracks(hyp);
  const auto inter = OverlapMatrix(hyp_tracks, ref_tracks);
  PurityCoverage pc;
  for (std::size_t h = 0; h < hyp_tracks.size(); ++h) {
    pc.hyp_total_s += hyp_tracks[h].Total();
    double best = 0.0;
    for (double v : inter[h]) best = std::max(best, v);
    pc.purity_overlap_s += best;
  }
  for (std::size_t r = 0; r < ref_tracks.size(); ++r) {
    pc.ref_total_s += ref_tracks[r].Total();
    double best = 0.0;
    for (std::size_t h = 0; h < hyp_tracks.size(); ++h) best = std::max(best, inter[h][r]);
    pc.coverage_overlap_s += best;
  }
  return pc;
}

DiarizationScores ScoreDiarization(const Timeline& ref, const Timeline& hyp,
                                   const ScoringConfig& cfg) {
  return {ComputeDer(ref, hyp, cfg), ComputeJer(ref, hyp),
          ComputePurityCoverage(ref, hyp)};
}

}  // namespace cogspeech::diar
