#pragma once

// Level-wise Apriori over learner transactions and tag selection from the
// resulting frequent itemsets.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lptag/error.hpp"
#include "lptag/ingest.hpp"

namespace lptag {

// One profile attribute value. For a5 the value is the lower bound of its
// time bin; a3/a4 carry the categorical id, not the quantified value.
struct AttributeItem {
  int attribute = 1;  // 1..5
  int value = 0;

  friend auto operator<=>(const AttributeItem&, const AttributeItem&) = default;
};

struct Transaction {
  std::string learner_id;
  std::vector<AttributeItem> items;  // sorted, one per attribute
};

inline Transaction make_transaction(const LearnerProfile& p) {
  return {p.learner_id,
          {{1, p.current_skill},
           {2, p.target_skill},
           {3, p.strategy},
           {4, p.presentation},
           {5, discretize_time(p.learning_hours).lower}}};
}

template <typename Item>
struct FrequentItemset {
  std::vector<Item> items;  // sorted
  std::size_t count = 0;
  double support = 0.0;

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

inline void check_support_level(double sl) {
  if (!(sl > 0.0 && sl <= 1.0)) throw ValidationError("support level must be in (0, 1]");
}

/// All itemsets whose support (count / |transactions|) is at least `sl`.
/// Each transaction must be sorted and free of duplicates. Output is ordered
/// by itemset size, then lexicographically.
template <typename Item>
std::vector<FrequentItemset<Item>> apriori(const std::vector<std::vector<Item>>& transactions, double sl) {
  check_support_level(sl);
  if (transactions.empty()) throw ValidationError("no transactions");
  const double n = static_cast<double>(transactions.size());
  const auto frequent = [&](std::size_t count) { return static_cast<double>(count) / n >= sl; };

  std::vector<FrequentItemset<Item>> out;
  std::vector<std::vector<Item>> level;

  {
    std::map<Item, std::size_t> counts;
    for (const auto& t : transactions)
      for (const auto& item : t) ++counts[item];
    for (const auto& [item, count] : counts) {
      if (!frequent(count)) continue;
      level.push_back({item});
      out.push_back({{item}, count, static_cast<double>(count) / n});
    }
  }

  while (level.size() > 1) {
    const std::set<std::vector<Item>> previous(level.begin(), level.end());
    const std::size_t prefix = level.front().size() - 1;
    std::vector<std::vector<Item>> next;

    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        if (!std::equal(level[i].begin(), level[i].begin() + prefix, level[j].begin())) break;
        std::vector<Item> candidate = level[i];
        candidate.push_back(level[j].back());

        // Every (k-1)-subset must be frequent; the two that drop one of the
        // last two items are level[i] and level[j] themselves.
        bool keep = true;
        std::vector<Item> sub;
        for (std::size_t drop = 0; drop < prefix && keep; ++drop) {
          sub.clear();
          for (std::size_t e = 0; e < candidate.size(); ++e)
            if (e != drop) sub.push_back(candidate[e]);
          keep = previous.contains(sub);
        }
        if (!keep) continue;

        std::size_t count = 0;
        for (const auto& t : transactions)
          if (std::includes(t.begin(), t.end(), candidate.begin(), candidate.end())) ++count;
        if (!frequent(count)) continue;
        out.push_back({candidate, count, static_cast<double>(count) / n});
        next.push_back(std::move(candidate));
      }
    }
    level = std::move(next);
  }
  return out;
}

inline std::vector<FrequentItemset<AttributeItem>> apriori(const std::vector<Transaction>& transactions, double sl) {
  std::vector<std::vector<AttributeItem>> items;
  items.reserve(transactions.size());
  for (const auto& t : transactions) items.push_back(t.items);
  return apriori(items, sl);
}

/// Itemsets with no frequent proper superset, in input order.
template <typename Item>
std::vector<FrequentItemset<Item>> maximal_itemsets(const std::vector<FrequentItemset<Item>>& frequent) {
  std::vector<FrequentItemset<Item>> out;
  for (const auto& candidate : frequent) {
    const bool dominated = std::any_of(frequent.begin(), frequent.end(), [&](const auto& other) {
      return other.items.size() > candidate.items.size() &&
             std::includes(other.items.begin(), other.items.end(), candidate.items.begin(), candidate.items.end());
    });
    if (!dominated) out.push_back(candidate);
  }
  return out;
}

/// The tag cloud: maximal itemsets of the largest cardinality, narrowed to
/// those with the highest support. Ties are all kept, sorted
/// lexicographically.
template <typename Item>
std::vector<FrequentItemset<Item>> select_tag(const std::vector<FrequentItemset<Item>>& frequent) {
  auto maximal = maximal_itemsets(frequent);
  if (maximal.empty()) return {};
  std::size_t best_size = 0;
  for (const auto& f : maximal) best_size = std::max(best_size, f.items.size());
  std::size_t best_count = 0;
  for (const auto& f : maximal)
    if (f.items.size() == best_size) best_count = std::max(best_count, f.count);

  std::vector<FrequentItemset<Item>> out;
  for (auto& f : maximal)
    if (f.items.size() == best_size && f.count == best_count) out.push_back(std::move(f));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.items < b.items; });
  return out;
}

}  // namespace lptag
