#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lptag/cli.hpp"
#include "lptag/synth.hpp"
#include "oracles.hpp"

using namespace lptag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lptag");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "lptag_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const auto rows = generate_ratings({.learners = 400, .resources = 30, .ratings = 6000, .seed = 3});
    std::ofstream ratings(dir_ / "ratings.csv");
    render_ratings(ratings, rows);
    const auto explicit_rows = generate_explicit_ratings({.learners = 400, .resources = 30, .ratings = 6000, .seed = 3});
    std::ofstream profiles(dir_ / "profiles.csv");
    render_profiles(profiles, generate_profiles(distinct_learners(explicit_rows), 3));
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, TagWritesStore) {
  const auto r = invoke({"tag", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv"), "--out",
                      path("store.json"), "--report", path("report.txt"), "--trace", path("trace.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("resources tagged"), std::string::npos);
  const auto store = load_store(path("store.json"));
  EXPECT_FALSE(store.empty());
  std::istringstream report(slurp(path("report.txt")));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(report, line)) {
    ++lines;
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    EXPECT_TRUE(store.contains(line.substr(0, tab)));
    for (const auto& t : oracle::split_cloud(line.substr(tab + 1))) EXPECT_TRUE(oracle::parse_tag(t)) << t;
  }
  EXPECT_EQ(lines, store.size());
  EXPECT_TRUE(slurp(path("trace.csv")).starts_with("resource_id,k,sse,avg_diameter\n"));
}

TEST_F(Cli, MissingRatingsFileIsIoError) {
  const auto r = invoke({"tag", "--ratings", path("nope.csv"), "--out", path("x.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path("nope.csv")), std::string::npos);
}

TEST_F(Cli, SameSeedSameBytes) {
  for (const char* name : {"s1.json", "s2.json"}) {
    const auto r = invoke({"tag", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv"), "--seed", "7",
                        "--out", path(name)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("s1.json")), slurp(path("s2.json")));
}

TEST_F(Cli, ValidationFailuresExitOne) {
  EXPECT_EQ(invoke({"tag", "--bogus"}).code, 1);
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"tag", "--ratings", path("ratings.csv"), "--out", path("x.json"), "--support", "0"}).code, 1);
  std::ofstream(path("bad.csv")) << "\"User-ID\";\"ISBN\";\"Book-Rating\"\n\"1\";\"2\";\"x\"\n";
  const auto strict = invoke({"ingest-check", "--ratings", path("bad.csv"), "--strict"});
  EXPECT_EQ(strict.code, 1);
  EXPECT_NE(strict.err.find("line 2"), std::string::npos);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(Cli, IngestCheckReportsCounts) {
  const auto r = invoke({"ingest-check", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.out.empty());
}

TEST_F(Cli, QuantifyThenMatchAndExports) {
  auto r = invoke({"quantify", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv"), "--out",
                path("values.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"tag", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv"), "--out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;

  r = invoke({"match", "--store", path("m.json"), "--values", path("values.json"), "--profile", "2,5,3,4,25", "--top", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    EXPECT_NE(line.find('\t'), std::string::npos);
  }
  EXPECT_EQ(n, 3);
  EXPECT_EQ(invoke({"match", "--store", path("m.json"), "--values", path("values.json"), "--profile", "2,5"}).code, 1);

  r = invoke({"export-values", "--values", path("values.json"), "--attribute", "presentation", "--out", path("v.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(oracle::well_formed_xml(slurp(path("v.svg"))));

  const auto store = load_store(path("m.json"));
  ASSERT_FALSE(store.empty());
  r = invoke({"export-parcoords", "--ratings", path("ratings.csv"), "--profiles", path("profiles.csv"), "--values",
           path("values.json"), "--resource", store.begin()->first, "--out", path("p.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = slurp(path("p.svg"));
  EXPECT_TRUE(oracle::well_formed_xml(doc));
  EXPECT_EQ(oracle::attribute_values(doc, "polyline", "points").size(), store.begin()->second.provenance.subset_size);
}

TEST_F(Cli, SynthProfilesCoversEveryLearner) {
  const auto r = invoke({"synth-profiles", "--ratings", path("ratings.csv"), "--synth-seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto parsed = parse_profiles(in);
  EXPECT_TRUE(parsed.rejected.empty());
  EXPECT_GT(parsed.profiles.size(), 300u);
}

TEST_F(Cli, UnwritableOutputIsIoError) {
  const auto r = invoke({"tag", "--ratings", path("ratings.csv"), "--out", "/nonexistent/dir/store.json"});
  EXPECT_EQ(r.code, 2);
}
