#pragma once

// Rating/profile file parsing, seeded profile synthesis and per-resource
// learner subsets.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lptag/error.hpp"

namespace lptag {

inline constexpr int kSkillLevels = 6;
inline constexpr int kNominalLevels = 5;
inline constexpr int kMaxRating = 10;
inline constexpr int kMaxSynthHours = 60;

inline constexpr std::string_view kRatingsHeader = R"("User-ID";"ISBN";"Book-Rating")";
inline constexpr std::string_view kProfilesHeader = "learner_id,a1,a2,a3,a4,a5_hours";

struct RatingRecord {
  std::string learner_id;
  std::string resource_id;
  int rating = 0;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

struct RatingParseResult {
  std::vector<RatingRecord> records;
  std::size_t dropped_zero = 0;
  std::size_t malformed = 0;
};

struct LearnerProfile {
  std::string learner_id;
  int current_skill = 1;   // a1
  int target_skill = 2;    // a2, strictly above a1
  int strategy = 1;        // a3, nominal 1..5
  int presentation = 1;    // a4, nominal 1..5
  int learning_hours = 1;  // a5

  friend bool operator==(const LearnerProfile&, const LearnerProfile&) = default;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct ProfileParseResult {
  std::vector<LearnerProfile> profiles;
  std::vector<RejectedRow> rejected;
  std::size_t duplicates = 0;
};

using ProfileIndex = std::map<std::string, LearnerProfile, std::less<>>;

// Inclusive decade bin: [1-10], [11-20], ...
struct TimeBin {
  int lower = 1;
  int upper = 10;

  bool contains(int hours) const noexcept { return lower <= hours && hours <= upper; }
  friend auto operator<=>(const TimeBin&, const TimeBin&) = default;
};

struct LearnerSubset {
  std::string resource_id;
  std::vector<std::string> members;  // sorted, unique

  std::size_t size() const noexcept { return members.size(); }
};

namespace detail {

inline void strip_line_end(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline void strip_bom(std::string& line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

// Splits `"a";"b";"c"`. Every field must be quoted; `""` inside a field is an
// escaped quote. Returns nullopt on any structural error.
inline std::optional<std::vector<std::string>> split_quoted(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size() || line[i] != '"') return std::nullopt;
    ++i;
    std::string field;
    bool closed = false;
    while (i < line.size()) {
      if (line[i] == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        closed = true;
        ++i;
        break;
      }
      field.push_back(line[i++]);
    }
    if (!closed) return std::nullopt;
    fields.push_back(std::move(field));
    if (i == line.size()) return fields;
    if (line[i] != sep) return std::nullopt;
    ++i;
  }
}

inline std::vector<std::string_view> split_plain(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<int> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline void write_quoted(std::ostream& os, std::string_view field) {
  os << '"';
  for (char c : field) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

}  // namespace detail

/// Parses a Book-Crossing style ratings file. Rows with rating 0 (implicit
/// interactions) are dropped and counted. In strict mode the first malformed
/// row throws a ParseError carrying its line number; otherwise malformed rows
/// are skipped and counted. A wrong or missing header always throws.
inline RatingParseResult parse_ratings(std::istream& in, bool strict) {
  RatingParseResult result;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing ratings header");
  ++line_no;
  detail::strip_line_end(line);
  detail::strip_bom(line);
  if (line != kRatingsHeader) {
    throw ParseError(1, "unexpected ratings header, expected " + std::string(kRatingsHeader));
  }

  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_line_end(line);
    if (line.empty()) continue;

    const char* problem = nullptr;
    std::optional<int> rating;
    auto fields = detail::split_quoted(line, ';');
    if (!fields || fields->size() != 3) {
      problem = "expected 3 quoted fields separated by ';'";
    } else if ((*fields)[0].empty() || (*fields)[1].empty()) {
      problem = "empty learner or resource id";
    } else if (rating = detail::parse_int((*fields)[2]); !rating || *rating < 0 || *rating > kMaxRating) {
      problem = "rating must be an integer in 0..10";
    }

    if (problem) {
      if (strict) throw ParseError(line_no, problem);
      ++result.malformed;
      continue;
    }
    if (*rating == 0) {
      ++result.dropped_zero;
      continue;
    }
    result.records.push_back({std::move((*fields)[0]), std::move((*fields)[1]), *rating});
  }
  return result;
}

inline void render_ratings(std::ostream& os, std::span<const RatingRecord> records) {
  os << kRatingsHeader << '\n';
  for (const auto& r : records) {
    detail::write_quoted(os, r.learner_id);
    os << ';';
    detail::write_quoted(os, r.resource_id);
    os << ";\"" << r.rating << "\"\n";
  }
}

// Reason string for an invalid profile, nullopt when valid.
inline std::optional<std::string> profile_violation(const LearnerProfile& p) {
  if (p.learner_id.empty()) return "empty learner_id";
  if (p.current_skill < 1 || p.current_skill > kSkillLevels) return "a1 out of range 1..6";
  if (p.target_skill < 1 || p.target_skill > kSkillLevels) return "a2 out of range 1..6";
  if (p.target_skill <= p.current_skill) return "a2 must exceed a1";
  if (p.strategy < 1 || p.strategy > kNominalLevels) return "a3 out of range 1..5";
  if (p.presentation < 1 || p.presentation > kNominalLevels) return "a4 out of range 1..5";
  if (p.learning_hours < 1) return "a5_hours must be positive";
  return std::nullopt;
}

/// Parses `learner_id,a1,a2,a3,a4,a5_hours` rows. Invalid rows are rejected
/// with a reason; a repeated learner_id keeps the last valid occurrence (at
/// the position of the first) and bumps `duplicates`.
inline ProfileParseResult parse_profiles(std::istream& in) {
  ProfileParseResult result;
  std::map<std::string, std::size_t, std::less<>> position;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing profiles header");
  ++line_no;
  detail::strip_line_end(line);
  detail::strip_bom(line);
  if (line != kProfilesHeader) {
    throw ParseError(1, "unexpected profiles header, expected " + std::string(kProfilesHeader));
  }

  static constexpr const char* kFieldNames[] = {"a1", "a2", "a3", "a4", "a5_hours"};
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_line_end(line);
    if (line.empty()) continue;

    const auto fields = detail::split_plain(line, ',');
    if (fields.size() != 6) {
      result.rejected.push_back({line_no, "expected 6 comma-separated fields"});
      continue;
    }
    int values[5] = {};
    std::optional<std::string> reason;
    for (std::size_t f = 0; f < 5 && !reason; ++f) {
      const auto v = detail::parse_int(fields[f + 1]);
      if (!v) {
        reason = std::string(kFieldNames[f]) + " is not an integer";
      } else {
        values[f] = *v;
      }
    }
    LearnerProfile profile{std::string(fields[0]), values[0], values[1], values[2], values[3], values[4]};
    if (!reason) reason = profile_violation(profile);
    if (reason) {
      result.rejected.push_back({line_no, std::move(*reason)});
      continue;
    }
    if (auto it = position.find(profile.learner_id); it != position.end()) {
      ++result.duplicates;
      result.profiles[it->second] = std::move(profile);
    } else {
      position.emplace(profile.learner_id, result.profiles.size());
      result.profiles.push_back(std::move(profile));
    }
  }
  return result;
}

inline void render_profiles(std::ostream& os, std::span<const LearnerProfile> profiles) {
  os << kProfilesHeader << '\n';
  for (const auto& p : profiles) {
    os << p.learner_id << ',' << p.current_skill << ',' << p.target_skill << ',' << p.strategy << ','
       << p.presentation << ',' << p.learning_hours << '\n';
  }
}

inline ProfileIndex index_profiles(std::span<const LearnerProfile> profiles) {
  ProfileIndex index;
  for (const auto& p : profiles) index.insert_or_assign(p.learner_id, p);
  return index;
}

/// Draws one random profile per id. The output is a pure function of
/// (learner_ids, seed).
inline std::vector<LearnerProfile> generate_profiles(std::span<const std::string> learner_ids,
                                                     std::uint64_t seed) {
  std::vector<LearnerProfile> out;
  out.reserve(learner_ids.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nominal(1, kNominalLevels);
  std::uniform_int_distribution<int> hours(1, kMaxSynthHours);
  for (const auto& id : learner_ids) {
    LearnerProfile p;
    p.learner_id = id;
    p.current_skill = std::uniform_int_distribution<int>(1, kSkillLevels - 1)(rng);
    p.target_skill = std::uniform_int_distribution<int>(p.current_skill + 1, kSkillLevels)(rng);
    p.strategy = nominal(rng);
    p.presentation = nominal(rng);
    p.learning_hours = hours(rng);
    out.push_back(std::move(p));
  }
  return out;
}

inline TimeBin discretize_time(int hours) {
  if (hours < 1) throw ValidationError("time must be positive");
  const int lower = ((hours - 1) / 10) * 10 + 1;
  return {lower, lower + 9};
}

inline void check_delta0(int delta0) {
  if (delta0 < 1 || delta0 > kMaxRating) throw ValidationError("delta0 must be in 1..10");
}

/// Learners who rated `resource_id` at least `delta0`.
inline LearnerSubset build_subset(std::span<const RatingRecord> ratings, std::string_view resource_id,
                                  int delta0) {
  check_delta0(delta0);
  LearnerSubset subset{std::string(resource_id), {}};
  for (const auto& r : ratings) {
    if (r.rating >= delta0 && r.resource_id == resource_id) subset.members.push_back(r.learner_id);
  }
  std::sort(subset.members.begin(), subset.members.end());
  subset.members.erase(std::unique(subset.members.begin(), subset.members.end()), subset.members.end());
  return subset;
}

/// One subset per distinct resource in `ratings` (including empty ones),
/// sorted by resource id. Single pass over the ratings.
inline std::vector<LearnerSubset> build_all_subsets(std::span<const RatingRecord> ratings, int delta0) {
  check_delta0(delta0);
  std::map<std::string_view, std::vector<std::string_view>> by_resource;
  for (const auto& r : ratings) {
    auto& members = by_resource[r.resource_id];
    if (r.rating >= delta0) members.push_back(r.learner_id);
  }
  std::vector<LearnerSubset> out;
  out.reserve(by_resource.size());
  for (auto& [resource, members] : by_resource) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    out.push_back({std::string(resource), std::vector<std::string>(members.begin(), members.end())});
  }
  return out;
}

// Sorted distinct learner ids appearing in `ratings`.
inline std::vector<std::string> distinct_learners(std::span<const RatingRecord> ratings) {
  std::vector<std::string_view> ids;
  ids.reserve(ratings.size());
  for (const auto& r : ratings) ids.push_back(r.learner_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return {ids.begin(), ids.end()};
}

}  // namespace lptag
