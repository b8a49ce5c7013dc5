#pragma once

// End-to-end tagging: subsets -> global quantification of a3/a4 -> per
// resource clustering, largest cluster, Apriori and tag selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lptag/cluster.hpp"
#include "lptag/error.hpp"
#include "lptag/ingest.hpp"
#include "lptag/mine.hpp"
#include "lptag/quantify.hpp"

namespace lptag {

struct PipelineConfig {
  int delta0 = 6;
  double support_sl = 0.1;
  int nmf_k = 10;
  int nmf_max_iters = 500;
  double nmf_tol = 1e-6;
  int k_max = 8;
  double gamma = 2.0;
  std::uint64_t seed = 0;
  int min_subset = 10;
  int kmeans_max_iters = kDefaultLloydIters;

  void validate() const {
    check_delta0(delta0);
    check_support_level(support_sl);
    if (nmf_k < 1) throw ValidationError("features must be >= 1");
    if (nmf_max_iters < 1) throw ValidationError("nmf max iterations must be >= 1");
    if (!(nmf_tol >= 0.0)) throw ValidationError("nmf tolerance must be >= 0");
    if (k_max < 1) throw ValidationError("kmax must be >= 1");
    if (!(gamma > 1.0)) throw ValidationError("gamma must be > 1");
    if (min_subset < 1) throw ValidationError("min-subset must be >= 1");
    if (kmeans_max_iters < 1) throw ValidationError("k-means max iterations must be >= 1");
  }

  // a3 uses `seed`, a4 uses `seed + 1`.
  NmfOptions nmf_options(NominalAttribute attribute) const {
    return {nmf_k, nmf_max_iters, nmf_tol, attribute == NominalAttribute::strategy ? seed : seed + 1};
  }
};

struct Tag {
  std::optional<int> current_skill;
  std::optional<int> target_skill;
  std::optional<TimeBin> time_bin;
  std::optional<double> strategy_value;
  std::optional<double> presentation_value;

  bool empty() const noexcept {
    return !current_skill && !target_skill && !time_bin && !strategy_value && !presentation_value;
  }
  friend bool operator==(const Tag&, const Tag&) = default;
};

struct Provenance {
  std::size_t subset_size = 0;
  std::size_t chosen_k = 0;
  std::size_t cluster_size = 0;
  double support = 0.0;
  std::size_t itemset_count = 0;
  std::vector<std::string> cluster_members;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct TagCloud {
  std::string resource_id;
  std::vector<Tag> tags;
  Provenance provenance;
  std::optional<std::string> skip_reason;

  friend bool operator==(const TagCloud&, const TagCloud&) = default;
};

using TagStore = std::map<std::string, TagCloud, std::less<>>;

inline constexpr const char* kSkipBelowThreshold = "subset below threshold";
inline constexpr const char* kSkipNoItemset = "no frequent itemset";

inline Tag tag_from_itemset(std::span<const AttributeItem> items, const AttributeValueMap& strategy_values,
                            const AttributeValueMap& presentation_values) {
  Tag tag;
  for (const auto& item : items) {
    switch (item.attribute) {
      case 1: tag.current_skill = item.value; break;
      case 2: tag.target_skill = item.value; break;
      case 3: tag.strategy_value = strategy_values.at(item.value); break;
      case 4: tag.presentation_value = presentation_values.at(item.value); break;
      case 5: tag.time_bin = discretize_time(item.value); break;
      default: throw ValidationError("unknown attribute index " + std::to_string(item.attribute));
    }
  }
  return tag;
}

struct RunOptions {
  bool keep_lattice = false;
};

struct RunResult {
  TagStore store;    // tagged resources only
  TagStore skipped;  // clouds carrying a skip_reason
  QuantifyResult strategy;
  QuantifyResult presentation;
  std::vector<std::pair<std::string, KTraceRow>> k_trace;
  std::map<std::string, std::vector<FrequentItemset<AttributeItem>>, std::less<>> lattice;

  std::string summary() const {
    std::ostringstream os;
    os << store.size() << " resources tagged, " << skipped.size() << " skipped";
    std::map<std::string, std::size_t> reasons;
    for (const auto& [id, cloud] : skipped) ++reasons[cloud.skip_reason.value_or("")];
    for (const auto& [reason, count] : reasons) os << "; " << count << " " << reason;
    return os.str();
  }
};

/// Tags every resource whose high-rating subset has at least
/// `config.min_subset` learners. Deterministic for fixed inputs and seed.
inline RunResult run(const PipelineConfig& config, std::span<const RatingRecord> ratings, const ProfileIndex& profiles,
                     const RunOptions& options = {}) {
  config.validate();
  RunResult result;

  const auto subsets = build_all_subsets(ratings, config.delta0);
  result.strategy = quantify_attribute_detailed(subsets, profiles, NominalAttribute::strategy,
                                                config.nmf_options(NominalAttribute::strategy));
  result.presentation = quantify_attribute_detailed(subsets, profiles, NominalAttribute::presentation,
                                                    config.nmf_options(NominalAttribute::presentation));
  const auto& sv = result.strategy.values;
  const auto& pv = result.presentation.values;

  for (const auto& subset : subsets) {
    TagCloud cloud;
    cloud.resource_id = subset.resource_id;
    cloud.provenance.subset_size = subset.size();
    if (subset.size() < static_cast<std::size_t>(config.min_subset)) {
      cloud.skip_reason = kSkipBelowThreshold;
      result.skipped.emplace(subset.resource_id, std::move(cloud));
      continue;
    }

    std::vector<std::string> members;
    if (subset.size() < 2) {
      members = subset.members;
      cloud.provenance.chosen_k = 1;
    } else {
      const auto raw = to_feature_points(subset, profiles, sv, pv);
      const auto points = apply_normalization(raw, fit_normalization(raw));
      auto selection = select_k(points, static_cast<std::size_t>(config.k_max), config.gamma, config.seed,
                                config.kmeans_max_iters);
      for (const auto& row : selection.trace) result.k_trace.emplace_back(subset.resource_id, row);
      cloud.provenance.chosen_k = selection.clustering.k;
      members = largest_cluster(selection.clustering);
    }

    std::vector<Transaction> transactions;
    transactions.reserve(members.size());
    for (const auto& id : members) transactions.push_back(make_transaction(profiles.find(id)->second));
    auto frequent = apriori(transactions, config.support_sl);
    const auto winners = select_tag(frequent);
    if (options.keep_lattice) result.lattice.emplace(subset.resource_id, std::move(frequent));

    cloud.provenance.cluster_size = members.size();
    cloud.provenance.cluster_members = std::move(members);
    if (winners.empty()) {
      cloud.skip_reason = kSkipNoItemset;
      result.skipped.emplace(subset.resource_id, std::move(cloud));
      continue;
    }
    cloud.provenance.support = winners.front().support;
    cloud.provenance.itemset_count = winners.front().count;
    for (const auto& w : winners) cloud.tags.push_back(tag_from_itemset(w.items, sv, pv));
    result.store.emplace(subset.resource_id, std::move(cloud));
  }
  return result;
}

/// `[6, 6, [41-50], 24240, 20549]`; absent fields render as `-` and
/// quantified values are rounded to integers.
inline std::string render_tag(const Tag& tag) {
  std::string out = "[";
  const auto integer = [&](const std::optional<int>& v) { out += v ? std::to_string(*v) : "-"; };
  const auto rounded = [&](const std::optional<double>& v) { out += v ? std::to_string(std::llround(*v)) : "-"; };
  integer(tag.current_skill);
  out += ", ";
  integer(tag.target_skill);
  out += ", ";
  if (tag.time_bin) {
    out += "[" + std::to_string(tag.time_bin->lower) + "-" + std::to_string(tag.time_bin->upper) + "]";
  } else {
    out += "-";
  }
  out += ", ";
  rounded(tag.strategy_value);
  out += ", ";
  rounded(tag.presentation_value);
  out += "]";
  return out;
}

inline std::string render_cloud(const TagCloud& cloud) {
  std::string out;
  for (std::size_t i = 0; i < cloud.tags.size(); ++i) {
    if (i) out += " and ";
    out += render_tag(cloud.tags[i]);
  }
  return out;
}

// One `<resource_id>\t<tag>[ and <tag>]*` line per tagged resource.
inline void write_report(std::ostream& os, const TagStore& store) {
  for (const auto& [id, cloud] : store) {
    if (cloud.tags.empty()) continue;
    os << id << '\t' << render_cloud(cloud) << '\n';
  }
}

namespace detail {

// True when `param`'s value is (one of) the closest to `v`.
inline bool nearest_parameter(const AttributeValueMap& values, int param, double v) {
  double best = std::abs(values.at(1) - v);
  for (int p = 2; p <= static_cast<int>(values.size()); ++p) best = std::min(best, std::abs(values.at(p) - v));
  return std::abs(values.at(param) - v) <= best;
}

}  // namespace detail

/// Fraction of the tag's present fields that agree with the profile.
inline double tag_match_score(const Tag& tag, const LearnerProfile& profile, const AttributeValueMap& strategy_values,
                              const AttributeValueMap& presentation_values) {
  int present = 0;
  int matched = 0;
  const auto check = [&](bool has, bool ok) {
    if (!has) return;
    ++present;
    if (ok) ++matched;
  };
  check(tag.current_skill.has_value(), tag.current_skill == profile.current_skill);
  check(tag.target_skill.has_value(), tag.target_skill == profile.target_skill);
  check(tag.time_bin.has_value(), tag.time_bin && tag.time_bin->contains(profile.learning_hours));
  check(tag.strategy_value.has_value(),
        tag.strategy_value && detail::nearest_parameter(strategy_values, profile.strategy, *tag.strategy_value));
  check(tag.presentation_value.has_value(),
        tag.presentation_value &&
            detail::nearest_parameter(presentation_values, profile.presentation, *tag.presentation_value));
  return present ? static_cast<double>(matched) / present : 0.0;
}

struct ResourceMatch {
  std::string resource_id;
  double score = 0.0;

  friend bool operator==(const ResourceMatch&, const ResourceMatch&) = default;
};

/// Resources ranked by their best tag's match score (descending, ties by
/// resource id).
inline std::vector<ResourceMatch> match_resources(const LearnerProfile& profile, const TagStore& store,
                                                  const AttributeValueMap& strategy_values,
                                                  const AttributeValueMap& presentation_values, int top_n) {
  if (top_n <= 0) throw ValidationError("top_n must be positive");
  if (store.empty()) throw ValidationError("tag store is empty");
  std::vector<ResourceMatch> ranked;
  ranked.reserve(store.size());
  for (const auto& [id, cloud] : store) {
    double best = 0.0;
    for (const auto& tag : cloud.tags)
      best = std::max(best, tag_match_score(tag, profile, strategy_values, presentation_values));
    ranked.push_back({id, best});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  ranked.resize(std::min(ranked.size(), static_cast<std::size_t>(top_n)));
  return ranked;
}

}  // namespace lptag
