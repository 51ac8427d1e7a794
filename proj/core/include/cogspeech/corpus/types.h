#ifndef COGSPEECH_CORPUS_TYPES_H_
#define COGSPEECH_CORPUS_TYPES_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogspeech::corpus {

enum class Group { kHc, kMci };
enum class Task { kMmse, kRw, kBnt, kRl, kVf, kPf };
enum class Split { kDevelopment, kHoldout };
enum class Domain { kLan, kMem, kExe, kVis };

inline constexpr std::array<Task, 6> kAllTasks = {
    Task::kMmse, Task::kRw, Task::kBnt, Task::kRl, Task::kVf, Task::kPf};
inline constexpr std::array<Domain, 4> kAllDomains = {
    Domain::kLan, Domain::kMem, Domain::kExe, Domain::kVis};

// Total CERAD+ score at or above which the binary target is 1.
inline constexpr double kCeradBinaryThreshold = 85.0;

std::string_view ToString(Group g);
std::string_view ToString(Task t);
std::string_view ToString(Split s);
std::string_view ToString(Domain d);
// Case-insensitive; nullopt for unknown tokens.
std::optional<Group> ParseGroup(std::string_view token);
std::optional<Task> ParseTask(std::string_view token);
std::optional<Split> ParseSplit(std::string_view token);
std::optional<Domain> ParseDomain(std::string_view token);

struct GlobalScores {
  std::optional<double> cerad_total;
  std::optional<int> cerad_binary;
  std::optional<int> mci;
};

// Task-, domain- and global-level scores. Absent entries stay absent.
struct LabelHierarchy {
  std::map<Task, double> level1;
  std::map<Domain, double> level2;
  GlobalScores level3;
};

struct SessionRecord {
  std::string session_id;
  std::string subject_id;
  Group group = Group::kHc;
  Task task = Task::kMmse;
  std::string audio_path;
  double sample_rate = 16000.0;
  LabelHierarchy labels;
  Split split = Split::kDevelopment;
  // Optional RTTM speaker label of the participant (column "participant").
  std::string participant;
};

// Speaker-attributed interval [onset, onset + duration) in seconds.
struct Segment {
  std::string speaker;
  double onset = 0.0;
  double duration = 0.0;

  double end() const { return onset + duration; }
  bool operator==(const Segment&) const = default;
};

// Tolerance for time comparisons (RTTM carries millisecond precision).
inline constexpr double kTimeEpsilon = 1e-3;

// Segments of one recording sorted by onset. Same-speaker segments never
// overlap; overlap between different speakers is allowed.
class Timeline {
 public:
  Timeline() = default;
  // Sorts by onset and validates; throws ValidationError.
  explicit Timeline(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  // Distinct speaker labels in first-appearance order.
  std::vector<std::string> Speakers() const;
  bool HasSpeaker(std::string_view speaker) const;
  // Segments of one speaker, in onset order.
  std::vector<Segment> SegmentsOf(std::string_view speaker) const;

  bool operator==(const Timeline&) const = default;

 private:
  std::vector<Segment> segments_;
};

}  // namespace cogspeech::corpus

#endif  // COGSPEECH_CORPUS_TYPES_H_
