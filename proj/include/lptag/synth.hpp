#pragma once

// Seeded synthetic rating corpora in the Book-Crossing shape, for tests,
// benchmarks and trying the CLI without the real dataset.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "lptag/error.hpp"
#include "lptag/ingest.hpp"

namespace lptag {

struct CorpusSpec {
  std::size_t learners = 1000;
  std::size_t resources = 100;
  std::size_t ratings = 20000;
  std::uint64_t seed = 0;
  double zero_fraction = 0.3;  // share of implicit (rating 0) rows
  // Resource r is drawn with weight (r + offset)^-exponent.
  double popularity_exponent = 0.9;
  double popularity_offset = 10.0;
};

inline std::string synth_learner_id(std::size_t i) { return std::to_string(100000 + i); }

inline std::string synth_resource_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%09zuX", i);
  return buf;
}

// Raw rows, including rating-0 implicit interactions.
inline std::vector<RatingRecord> generate_ratings(const CorpusSpec& spec) {
  if (spec.learners == 0 || spec.resources == 0) throw ValidationError("corpus needs learners and resources");
  std::vector<double> weights(spec.resources);
  for (std::size_t r = 0; r < spec.resources; ++r)
    weights[r] = std::pow(static_cast<double>(r) + spec.popularity_offset, -spec.popularity_exponent);

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> learner(0, spec.learners - 1);
  std::discrete_distribution<std::size_t> resource(weights.begin(), weights.end());
  std::bernoulli_distribution implicit(spec.zero_fraction);
  std::uniform_int_distribution<int> explicit_rating(1, kMaxRating);

  std::vector<std::string> learner_ids(spec.learners);
  for (std::size_t i = 0; i < spec.learners; ++i) learner_ids[i] = synth_learner_id(i);
  std::vector<std::string> resource_ids(spec.resources);
  for (std::size_t i = 0; i < spec.resources; ++i) resource_ids[i] = synth_resource_id(i);

  std::vector<RatingRecord> out;
  out.reserve(spec.ratings);
  for (std::size_t i = 0; i < spec.ratings; ++i) {
    const auto& l = learner_ids[learner(rng)];
    const auto& r = resource_ids[resource(rng)];
    const int rating = implicit(rng) ? 0 : explicit_rating(rng);
    out.push_back({l, r, rating});
  }
  return out;
}

// The rows that survive ingestion (rating 0 removed).
inline std::vector<RatingRecord> generate_explicit_ratings(const CorpusSpec& spec) {
  auto rows = generate_ratings(spec);
  std::erase_if(rows, [](const RatingRecord& r) { return r.rating == 0; });
  return rows;
}

}  // namespace lptag
