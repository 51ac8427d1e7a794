#ifndef COGSPEECH_SRC_FEATURES_FRAME_ANALYSIS_H_
#define COGSPEECH_SRC_FEATURES_FRAME_ANALYSIS_H_

#include <cstddef>
#include <vector>

#include "cogspeech/common/signal.h"
#include "cogspeech/features/lld.h"

namespace cogspeech::features::internal {

// Normalised cross-correlation of one frame against lagged copies.
struct NccfFrame {
  bool silent = true;
  std::size_t min_lag = 0;
  // r[k] belongs to lag min_lag - 1 + k.
  std::vector<double> r;
};

class NccfAnalyzer {
 public:
  NccfAnalyzer(const Signal& x, const F0Config& cfg);
  std::size_t frame_count() const { return frame_count_; }
  NccfFrame Analyze(std::size_t frame) const;

 private:
  std::vector<double> padded_;
  std::size_t frame_len_, hop_, min_lag_, max_lag_, frame_count_;
};

bool FrameIsSilent(const Signal& x, std::size_t start, std::size_t len);

LldContour EmptyContour(const std::string& name, std::size_t frames, Scale scale);

}  // namespace cogspeech::features::internal

#endif  // COGSPEECH_SRC_FEATURES_FRAME_ANALYSIS_H_
