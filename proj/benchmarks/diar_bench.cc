#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "cogspeech/diar/metrics.h"

namespace {

cogspeech::corpus::Timeline Random(std::uint64_t seed, int segments, int speakers) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cogspeech::corpus::Segment> segs;
  std::vector<double> free_at(speakers, 0.0);
  double t = 0.0;
  for (int i = 0; i < segments; ++i) {
    const double d = 0.5 + 3.0 * u(rng);
    const auto s = static_cast<int>(rng() % speakers);
    const double onset = std::max(t, free_at[s]);
    segs.push_back({"spk" + std::to_string(s), onset, d});
    free_at[s] = onset + d;
    t = onset + d * (0.6 + 0.6 * u(rng));
  }
  return cogspeech::corpus::Timeline(segs);
}

void BM_ScoreDiarization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ref = Random(1, n, 4);
  const auto hyp = Random(2, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(cogspeech::diar::ScoreDiarization(ref, hyp));
}
BENCHMARK(BM_ScoreDiarization)->Arg(100)->Arg(1000);

}  // namespace
