#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "lptag/ingest.hpp"
#include "lptag/synth.hpp"
#include "oracles.hpp"

using namespace lptag;

namespace {

RatingParseResult parse_text(const std::string& body, bool strict = false) {
  std::istringstream in(std::string(kRatingsHeader) + "\n" + body);
  return parse_ratings(in, strict);
}

ProfileParseResult parse_profile_text(const std::string& body) {
  std::istringstream in(std::string(kProfilesHeader) + "\n" + body);
  return parse_profiles(in);
}

}  // namespace

TEST(ParseRatings, MapsFieldsDirectly) {
  const auto r = parse_text("\"276725\";\"034545104X\";\"7\"\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0], (RatingRecord{"276725", "034545104X", 7}));
  EXPECT_EQ(r.malformed, 0u);
}

TEST(ParseRatings, DropsImplicitZeroRatings) {
  const auto r = parse_text("\"276726\";\"0155061224\";\"0\"\n");
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.dropped_zero, 1u);
}

TEST(ParseRatings, AcceptsCrlfAndBlankLines) {
  std::istringstream in(std::string(kRatingsHeader) + "\r\n\"a\";\"b\";\"10\"\r\n\r\n\"c\";\"d\";\"1\"\r\n");
  const auto r = parse_ratings(in, true);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].rating, 1);
}

TEST(ParseRatings, RejectsWrongHeader) {
  std::istringstream in("User-ID;ISBN;Book-Rating\n\"a\";\"b\";\"5\"\n");
  EXPECT_THROW(parse_ratings(in, false), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(parse_ratings(empty, false), ParseError);
}

TEST(ParseRatings, StrictModeReportsLineNumber) {
  try {
    parse_text("\"a\";\"b\";\"5\"\n\"a\";\"b\";\"11\"\n", true);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseRatings, LenientModeCountsMalformedRows) {
  const auto r = parse_text("\"a\";\"b\";\"5\"\na;b;5\n\"\";\"b\";\"5\"\n\"a\";\"b\";\"x\"\n\"a\";\"b\"\n");
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.malformed, 4u);
}

TEST(ParseRatings, SeededFileWith37MalformedRows) {
  CorpusSpec spec;
  spec.learners = 200;
  spec.resources = 50;
  spec.ratings = 1000;
  spec.seed = 11;
  spec.zero_fraction = 0.0;
  const auto rows = generate_ratings(spec);
  std::ostringstream os;
  render_ratings(os, rows);

  std::vector<std::string> lines;
  {
    std::istringstream in(os.str());
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  ASSERT_EQ(lines.size(), 1001u);

  std::vector<std::size_t> picks(1000);
  std::iota(picks.begin(), picks.end(), 1);
  std::mt19937_64 rng(37);
  std::shuffle(picks.begin(), picks.end(), rng);
  const std::vector<std::string> corruptions = {"\"1\";\"2\"", "\"1\";\"2\";\"3\";\"4\"", "\"1\";\"2\";\"11\"",
                                                "\"1\";\"2\";\"seven\"", "\"\";\"2\";\"3\"", "1;2;3",
                                                "\"1\",\"2\",\"3\"", "\"1\";\"2\";\"-1\""};
  for (std::size_t i = 0; i < 37; ++i) lines[picks[i]] = corruptions[i % corruptions.size()];

  std::string text;
  std::size_t oracle_bad = 0, oracle_good = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    text += lines[i] + "\n";
    if (i == 0) continue;
    if (oracle::valid_rating_line(lines[i])) {
      ++oracle_good;
    } else {
      ++oracle_bad;
    }
  }
  ASSERT_EQ(oracle_bad, 37u);
  ASSERT_EQ(oracle_good, 963u);

  std::istringstream in(text);
  const auto r = parse_ratings(in, false);
  EXPECT_EQ(r.records.size(), 963u);
  EXPECT_EQ(r.malformed, 37u);
  EXPECT_EQ(r.dropped_zero, 0u);
}

TEST(ParseRatings, RenderThenParseIsIdentity) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "0123456789AXbq;\" -";
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RatingRecord> records;
    for (int i = 0; i < 40; ++i) {
      const auto token = [&] {
        std::string s;
        const auto len = 1 + rng() % 12;
        for (std::size_t c = 0; c < len; ++c) s += alphabet[rng() % alphabet.size()];
        return s;
      };
      records.push_back({token(), token(), static_cast<int>(1 + rng() % 10)});
    }
    std::ostringstream os;
    render_ratings(os, records);
    std::istringstream in(os.str());
    EXPECT_EQ(parse_ratings(in, true).records, records);
  }
}

TEST(ParseProfiles, DirectMappingAndBoundaries) {
  const auto r = parse_profile_text("u1,2,5,3,4,25\nu3,1,6,5,5,60\n");
  ASSERT_EQ(r.profiles.size(), 2u);
  EXPECT_EQ(r.profiles[0], (LearnerProfile{"u1", 2, 5, 3, 4, 25}));
  EXPECT_EQ(r.profiles[1], (LearnerProfile{"u3", 1, 6, 5, 5, 60}));
  EXPECT_TRUE(r.rejected.empty());
}

TEST(ParseProfiles, RejectsTargetNotAboveCurrent) {
  const auto r = parse_profile_text("u2,4,4,1,1,10\n");
  EXPECT_TRUE(r.profiles.empty());
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, "a2 must exceed a1");
  EXPECT_EQ(r.rejected[0].line, 2u);
}

TEST(ParseProfiles, RejectsOutOfRangeAndMalformedRows) {
  const auto r = parse_profile_text("a,0,2,1,1,1\nb,1,7,1,1,1\nc,1,2,6,1,1\nd,1,2,1,0,1\ne,1,2,1,1,0\nf,1,2\ng,1,x,1,1,1\n");
  EXPECT_TRUE(r.profiles.empty());
  ASSERT_EQ(r.rejected.size(), 7u);
  EXPECT_EQ(r.rejected[0].reason, "a1 out of range 1..6");
  EXPECT_EQ(r.rejected[1].reason, "a2 out of range 1..6");
  EXPECT_EQ(r.rejected[2].reason, "a3 out of range 1..5");
  EXPECT_EQ(r.rejected[3].reason, "a4 out of range 1..5");
  EXPECT_EQ(r.rejected[4].reason, "a5_hours must be positive");
  EXPECT_EQ(r.rejected[5].reason, "expected 6 comma-separated fields");
  EXPECT_EQ(r.rejected[6].reason, "a2 is not an integer");
}

TEST(ParseProfiles, DuplicateKeepsLastOccurrence) {
  const auto r = parse_profile_text("u1,1,2,1,1,5\nu2,2,3,2,2,6\nu1,3,4,3,3,7\n");
  ASSERT_EQ(r.profiles.size(), 2u);
  EXPECT_EQ(r.duplicates, 1u);
  EXPECT_EQ(r.profiles[0], (LearnerProfile{"u1", 3, 4, 3, 3, 7}));
}

TEST(ParseProfiles, RejectsWrongHeader) {
  std::istringstream in("id,a1,a2,a3,a4,a5\n");
  EXPECT_THROW(parse_profiles(in), ParseError);
}

TEST(GenerateProfiles, DeterministicAndValid) {
  std::vector<std::string> ids;
  for (int i = 0; i < 500; ++i) ids.push_back("l" + std::to_string(i));
  const auto a = generate_profiles(ids, 99);
  const auto b = generate_profiles(ids, 99);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_profiles(ids, 100));
  for (const auto& p : a) {
    EXPECT_FALSE(profile_violation(p).has_value()) << p.learner_id;
    EXPECT_GT(p.target_skill, p.current_skill);
    EXPECT_LE(p.current_skill, 5);
    EXPECT_LE(p.learning_hours, 60);
  }
  EXPECT_TRUE(generate_profiles({}, 1).empty());
}

TEST(GenerateProfiles, StrategyIsUniform) {
  std::vector<std::string> ids;
  for (int i = 0; i < 10000; ++i) ids.push_back(std::to_string(i));
  const auto profiles = generate_profiles(ids, 42);
  std::map<int, int> freq;
  for (const auto& p : profiles) ++freq[p.strategy];
  ASSERT_EQ(freq.size(), 5u);
  // Binomial(10000, 0.2): mean 2000, standard error 40.
  for (const auto& [value, count] : freq) {
    EXPECT_GE(count, 2000 - 5 * 40) << "a3=" << value;
    EXPECT_LE(count, 2000 + 5 * 40) << "a3=" << value;
  }
}

TEST(DiscretizeTime, DecadeBins) {
  EXPECT_EQ(discretize_time(45), (TimeBin{41, 50}));
  EXPECT_EQ(discretize_time(10), (TimeBin{1, 10}));
  EXPECT_EQ(discretize_time(51), (TimeBin{51, 60}));
  EXPECT_EQ(discretize_time(1), (TimeBin{1, 10}));
  EXPECT_EQ(discretize_time(11), (TimeBin{11, 20}));
  EXPECT_THROW(discretize_time(0), ValidationError);
  EXPECT_THROW(discretize_time(-3), ValidationError);
}

TEST(DiscretizeTime, BinContainsItsInput) {
  for (int h = 1; h <= 2000; ++h) {
    const auto bin = discretize_time(h);
    EXPECT_TRUE(bin.contains(h));
    EXPECT_EQ(bin.upper, bin.lower + 9);
    EXPECT_EQ(bin.lower % 10, 1);
  }
}

TEST(BuildSubset, ThresholdIsInclusive) {
  const std::vector<RatingRecord> ratings = {{"u1", "r", 7}, {"u2", "r", 6}, {"u3", "r", 5}, {"u4", "s", 9}};
  const auto s = build_subset(ratings, "r", 6);
  EXPECT_EQ(s.members, (std::vector<std::string>{"u1", "u2"}));
  EXPECT_TRUE(build_subset({}, "r", 6).members.empty());
  EXPECT_TRUE(build_subset(ratings, "absent", 6).members.empty());
  EXPECT_THROW(build_subset(ratings, "r", 0), ValidationError);
  EXPECT_THROW(build_subset(ratings, "r", 11), ValidationError);
}

TEST(BuildSubset, DuplicateRatingsCountOnce) {
  const std::vector<RatingRecord> ratings = {{"u1", "r", 3}, {"u1", "r", 8}, {"u1", "r", 9}};
  EXPECT_EQ(build_subset(ratings, "r", 6).members, (std::vector<std::string>{"u1"}));
}

TEST(BuildSubset, MatchesLinearScanOn50kRatings) {
  CorpusSpec spec;
  spec.learners = 3000;
  spec.resources = 200;
  spec.ratings = 50000;
  spec.seed = 3;
  const auto ratings = generate_explicit_ratings(spec);

  std::map<std::string, std::set<std::string>> oracle;
  for (const auto& r : ratings) {
    auto& s = oracle[r.resource_id];
    if (r.rating >= 6) s.insert(r.learner_id);
  }
  const auto all = build_all_subsets(ratings, 6);
  ASSERT_EQ(all.size(), oracle.size());
  for (const auto& subset : all) {
    const auto& expected = oracle.at(subset.resource_id);
    EXPECT_EQ(subset.size(), expected.size());
    EXPECT_EQ(subset.members, std::vector<std::string>(expected.begin(), expected.end()));
  }
  for (const auto& resource : {synth_resource_id(0), synth_resource_id(17), synth_resource_id(199)}) {
    EXPECT_EQ(build_subset(ratings, resource, 6).members,
              std::vector<std::string>(oracle[resource].begin(), oracle[resource].end()));
  }
}
