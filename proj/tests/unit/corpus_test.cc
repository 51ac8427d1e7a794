#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cogspeech/common/error.h"
#include "cogspeech/corpus/manifest.h"
#include "cogspeech/corpus/rttm.h"
#include "cogspeech/corpus/validate.h"
#include "synth.h"

namespace cogspeech::corpus {
namespace {

const char* kHeader =
    "session_id,subject_id,group,task,split,audio_path,sample_rate,pf,vf,rl,rw,bnt,mmse,"
    "lan,mem,exe,vis,cerad_total,cerad_binary,mci\n";

TEST(Rttm, SingleLineMapsFields) {
  const Timeline tl = ParseRttm("SPEAKER rec1 1 0.00 10.00 <NA> <NA> spkA <NA> <NA>\n");
  ASSERT_EQ(tl.size(), 1u);
  EXPECT_EQ(tl.segments()[0], (Segment{"spkA", 0.0, 10.0}));
}

TEST(Rttm, EmptyInputIsEmptyTimeline) {
  EXPECT_TRUE(ParseRttm("").empty());
  EXPECT_TRUE(ParseRttm("\n# comment\n;; other\n").empty());
}

TEST(Rttm, SameSpeakerOverlapIsRejected) {
  const std::string text =
      "SPEAKER r 1 0 5 <NA> <NA> spkA <NA> <NA>\n"
      "SPEAKER r 1 4 2 <NA> <NA> spkA <NA> <NA>\n";
  EXPECT_THROW(ParseRttm(text), ValidationError);
}

TEST(Rttm, CrossSpeakerOverlapIsAllowed) {
  const std::string text =
      "SPEAKER r 1 0 5 <NA> <NA> spkA <NA> <NA>\n"
      "SPEAKER r 1 4 2 <NA> <NA> spkB <NA> <NA>\n";
  EXPECT_EQ(ParseRttm(text).size(), 2u);
}

TEST(Rttm, MalformedLineReportsLineNumber) {
  const std::string text =
      "SPEAKER r 1 0 5 <NA> <NA> spkA <NA> <NA>\n"
      "SPEAKER r 1 zero 5 <NA> <NA> spkB <NA> <NA>\n";
  try {
    ParseRttm(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(ParseRttm("SPEAKER r 1 0 5\n"), ParseError);
  EXPECT_THROW(ParseRttm("LEXEME r 1 0 5 <NA> <NA> spkA <NA> <NA>\n"), ParseError);
}

TEST(Rttm, NegativeDurationIsValidationError) {
  EXPECT_THROW(ParseRttm("SPEAKER r 1 1 -2 <NA> <NA> spkA <NA> <NA>\n"), ValidationError);
}

TEST(Rttm, TimesAreRoundedToMilliseconds) {
  const Timeline tl = ParseRttm("SPEAKER r 1 1.23449 0.5 <NA> <NA> a <NA> <NA>\n");
  EXPECT_DOUBLE_EQ(tl.segments()[0].onset, 1.234);
}

TEST(Rttm, SerializeParseRoundTripOnRandomTimelines) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Timeline tl = testing::RandomTimeline(rng, 5, 20, 60.0, 0.001);
    const Timeline back = ParseRttm(SerializeRttm(tl, "rec"));
    ASSERT_EQ(back.size(), tl.size());
    for (std::size_t i = 0; i < tl.size(); ++i) {
      EXPECT_EQ(back.segments()[i].speaker, tl.segments()[i].speaker);
      EXPECT_NEAR(back.segments()[i].onset, tl.segments()[i].onset, 5e-4);
      EXPECT_NEAR(back.segments()[i].duration, tl.segments()[i].duration, 5e-4);
    }
    // A second pass is exact.
    EXPECT_EQ(SerializeRttm(back, "rec"), SerializeRttm(ParseRttm(SerializeRttm(back, "rec")), "rec"));
  }
}

TEST(Timeline, SpeakersInFirstAppearanceOrder) {
  const Timeline tl({{"b", 2, 1}, {"a", 0, 1}, {"b", 0.5, 1}});
  EXPECT_EQ(tl.Speakers(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(tl.SegmentsOf("b").size(), 2u);
  EXPECT_TRUE(tl.HasSpeaker("a"));
  EXPECT_FALSE(tl.HasSpeaker("c"));
}

std::string Row(const std::string& id, const std::string& subject, const std::string& group,
                const std::string& task, const std::string& split, const std::string& scores) {
  return id + "," + subject + "," + group + "," + task + "," + split + ",a.wav,16000," + scores +
         "\n";
}

TEST(Manifest, CeradBinaryIsDerivedAtThreshold) {
  const Manifest m =
      ParseManifest(std::string(kHeader) +
                    Row("s1", "p1", "HC", "PF", "development", ",,,,,,,,,,85.0,,"));
  ASSERT_EQ(m.records.size(), 1u);
  EXPECT_EQ(m.records[0].labels.level3.cerad_binary, 1);
  const Manifest below = ParseManifest(
      std::string(kHeader) + Row("s1", "p1", "HC", "PF", "development", ",,,,,,,,,,84.9,,"));
  EXPECT_EQ(below.records[0].labels.level3.cerad_binary, 0);
}

TEST(Manifest, GroupMciContradictionIsRejected) {
  EXPECT_THROW(ParseManifest(std::string(kHeader) +
                             Row("s1", "p1", "HC", "MMSE", "development", ",,,,,,,,,,,,1")),
               ValidationError);
}

TEST(Manifest, BinaryContradictingTotalIsRejected) {
  EXPECT_THROW(ParseManifest(std::string(kHeader) +
                             Row("s1", "p1", "HC", "MMSE", "development", ",,,,,,,,,,84.9,1,")),
               ValidationError);
}

TEST(Manifest, StructuralErrors) {
  EXPECT_THROW(ParseManifest(std::string(kHeader) +
                             Row("s1", "p1", "HC", "XYZ", "development", ",,,,,,,,,,,,")),
               ParseError);
  EXPECT_THROW(ParseManifest(std::string(kHeader) +
                             Row("s1", "p1", "HC", "PF", "development", ",,,,,,,,,,,,") +
                             Row("s1", "p2", "HC", "VF", "development", ",,,,,,,,,,,,")),
               ValidationError);
  EXPECT_THROW(ParseManifest("session_id,subject_id,group,task,split,audio_path\n"), ParseError);
  EXPECT_THROW(ParseManifest(std::string(kHeader) +
                             Row("s1", "p1", "HC", "PF", "development", "nan,,,,,,,,,,,,")),
               Error);
}

TEST(Manifest, AbsentScoresStayAbsent) {
  const Manifest m = ParseManifest(
      std::string(kHeader) + Row("s1", "p1", "HC", "MMSE", "development", ",,,,,28,,,,,,,"));
  const auto& l = m.records[0].labels;
  EXPECT_EQ(l.level1.size(), 1u);
  EXPECT_EQ(l.level1.at(Task::kMmse), 28.0);
  EXPECT_TRUE(l.level2.empty());
  EXPECT_FALSE(l.level3.cerad_total);
  EXPECT_FALSE(l.level3.cerad_binary);
  EXPECT_FALSE(l.level3.mci);
}

TEST(Manifest, LargeManifestPreservesSubjectMultiplicity) {
  std::mt19937_64 rng(3);
  std::string text = kHeader;
  std::vector<int> subject_of(959);
  for (int i = 0; i < 959; ++i) subject_of[i] = i < 593 ? i : static_cast<int>(rng() % 593);
  for (int i = 0; i < 959; ++i) {
    text += Row("s" + std::to_string(i), "p" + std::to_string(subject_of[i]), "HC", "MMSE",
                "development", ",,,,,27,,,,,,,");
  }
  const Manifest m = ParseManifest(text);
  ASSERT_EQ(m.records.size(), 959u);
  std::set<std::string> subjects;
  for (const auto& r : m.records) subjects.insert(r.subject_id);
  EXPECT_EQ(subjects.size(), 593u);
}

TEST(Manifest, RangeDirectivesAndSerializationRoundTrip) {
  const std::string text = "# range lan 0 1\n" + std::string(kHeader) +
                           Row("s1", "p1", "MCI", "RW", "holdout", "3,4,5,6,7,28,0.8,0.7,0.6,0.5,90,,1");
  const Manifest m = ParseManifest(text);
  EXPECT_EQ(m.ranges.at("lan").hi, 1.0);
  const Manifest again = ParseManifest(SerializeManifest(m));
  ASSERT_EQ(again.records.size(), 1u);
  EXPECT_EQ(again.records[0].labels.level2, m.records[0].labels.level2);
  EXPECT_EQ(again.records[0].labels.level1, m.records[0].labels.level1);
  EXPECT_EQ(again.records[0].split, Split::kHoldout);
  EXPECT_EQ(again.ranges.at("lan").lo, 0.0);
}

TEST(Manifest, MissingFileIsInputError) {
  EXPECT_THROW(LoadManifest("/nonexistent/manifest.csv"), InputError);
}

SessionRecord Clean(const std::string& id, const std::string& subject) {
  SessionRecord r;
  r.session_id = id;
  r.subject_id = subject;
  r.labels.level1[Task::kMmse] = 28.0;
  r.labels.level2[Domain::kLan] = 0.8;
  r.labels.level3.cerad_total = 90.0;
  r.labels.level3.cerad_binary = 1;
  r.labels.level3.mci = 0;
  return r;
}

bool HasIssue(const std::vector<Issue>& issues, IssueKind kind) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const Issue& i) { return i.kind == kind; });
}

TEST(Validate, ThresholdMismatch) {
  SessionRecord r = Clean("s1", "p1");
  r.labels.level3.cerad_total = 84.9;
  r.labels.level3.cerad_binary = 1;
  const auto issues = ValidateHierarchy({r});
  ASSERT_TRUE(HasIssue(issues, IssueKind::kThresholdMismatch));
  EXPECT_EQ(ToString(IssueKind::kThresholdMismatch), "binary/threshold mismatch");
}

TEST(Validate, SplitLeakage) {
  SessionRecord a = Clean("s1", "p1");
  SessionRecord b = Clean("s2", "p1");
  b.split = Split::kHoldout;
  const auto issues = ValidateHierarchy({a, b});
  ASSERT_TRUE(HasIssue(issues, IssueKind::kSplitLeakage));
  EXPECT_EQ(ToString(IssueKind::kSplitLeakage), "split leakage");
}

TEST(Validate, CleanManifestHasNoIssues) {
  EXPECT_TRUE(ValidateHierarchy({Clean("s1", "p1"), Clean("s2", "p2")}).empty());
}

TEST(Validate, FuzzedPlantedDefectsAreAllFlagged) {
  std::mt19937_64 rng(5);
  ScoreRanges ranges = DefaultScoreRanges();
  ranges["lan"] = {0.0, 1.0};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SessionRecord> recs;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      recs.push_back(Clean("s" + std::to_string(i), "p" + std::to_string(i)));
    }
    const std::size_t victim = rng() % recs.size();
    SessionRecord& v = recs[victim];
    IssueKind planted;
    switch (rng() % 5) {
      case 0:
        v.labels.level3.cerad_binary = 0;  // total is 90
        planted = IssueKind::kThresholdMismatch;
        break;
      case 1:
        v.labels.level1[Task::kMmse] = 31.0;
        planted = IssueKind::kOutOfRange;
        break;
      case 2:
        v.labels.level2[Domain::kLan] = std::numeric_limits<double>::infinity();
        planted = IssueKind::kNonFinite;
        break;
      case 3:
        v.labels.level3.mci = 1;  // group stays HC
        planted = IssueKind::kGroupContradiction;
        break;
      default: {
        SessionRecord dup = Clean("extra", v.subject_id);
        dup.split = Split::kHoldout;
        recs.push_back(dup);
        planted = IssueKind::kSplitLeakage;
      }
    }
    const auto issues = ValidateHierarchy(recs, ranges);
    EXPECT_TRUE(HasIssue(issues, planted)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace cogspeech::corpus
