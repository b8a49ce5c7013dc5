#pragma once

// JSON persistence: tag store, quantification dump and frequent-itemset
// lattice. Plus the small file helpers the CLI uses.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "lptag/error.hpp"
#include "lptag/pipeline.hpp"
#include "lptag/quantify.hpp"

namespace lptag {

using json = nlohmann::json;

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace detail {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

}  // namespace detail

inline json tag_to_json(const Tag& tag) {
  json j;
  j["current_skill"] = detail::optional_json(tag.current_skill);
  j["target_skill"] = detail::optional_json(tag.target_skill);
  j["time_bin"] = tag.time_bin ? json::array({tag.time_bin->lower, tag.time_bin->upper}) : json(nullptr);
  j["strategy_value"] = detail::optional_json(tag.strategy_value);
  j["presentation_value"] = detail::optional_json(tag.presentation_value);
  return j;
}

inline Tag tag_from_json(const json& j) {
  Tag tag;
  tag.current_skill = detail::optional_from<int>(j, "current_skill");
  tag.target_skill = detail::optional_from<int>(j, "target_skill");
  if (const auto& bin = j.at("time_bin"); !bin.is_null()) {
    if (!bin.is_array() || bin.size() != 2) throw ValidationError("time_bin must be a [lower, upper] pair");
    tag.time_bin = TimeBin{bin[0].get<int>(), bin[1].get<int>()};
  }
  tag.strategy_value = detail::optional_from<double>(j, "strategy_value");
  tag.presentation_value = detail::optional_from<double>(j, "presentation_value");
  return tag;
}

inline json cloud_to_json(const TagCloud& cloud) {
  json tags = json::array();
  for (const auto& t : cloud.tags) tags.push_back(tag_to_json(t));
  const auto& p = cloud.provenance;
  json j{{"tags", std::move(tags)},
         {"provenance",
          {{"subset_size", p.subset_size},
           {"chosen_k", p.chosen_k},
           {"cluster_size", p.cluster_size},
           {"support", p.support},
           {"itemset_count", p.itemset_count},
           {"cluster_members", p.cluster_members}}}};
  if (cloud.skip_reason) j["skipped"] = *cloud.skip_reason;
  return j;
}

inline TagCloud cloud_from_json(const std::string& resource_id, const json& j) {
  TagCloud cloud;
  cloud.resource_id = resource_id;
  for (const auto& t : j.at("tags")) cloud.tags.push_back(tag_from_json(t));
  const auto& p = j.at("provenance");
  cloud.provenance.subset_size = p.at("subset_size").get<std::size_t>();
  cloud.provenance.chosen_k = p.at("chosen_k").get<std::size_t>();
  cloud.provenance.cluster_size = p.at("cluster_size").get<std::size_t>();
  cloud.provenance.support = p.at("support").get<double>();
  cloud.provenance.itemset_count = p.at("itemset_count").get<std::size_t>();
  cloud.provenance.cluster_members = p.at("cluster_members").get<std::vector<std::string>>();
  if (j.contains("skipped")) cloud.skip_reason = j.at("skipped").get<std::string>();
  return cloud;
}

inline json store_to_json(const TagStore& store) {
  json j = json::object();
  for (const auto& [id, cloud] : store) j[id] = cloud_to_json(cloud);
  return j;
}

inline TagStore store_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("store: top level must be an object keyed by resource id");
  TagStore store;
  for (const auto& [id, value] : j.items()) {
    try {
      store.emplace(id, cloud_from_json(id, value));
    } catch (const json::exception& e) {
      throw ValidationError("store: resource '" + id + "': " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("store: resource '" + id + "': " + e.what());
    }
  }
  return store;
}

inline std::string dump_store(const TagStore& store) { return store_to_json(store).dump(2) + "\n"; }

inline TagStore parse_store(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("store: ") + e.what());
  }
  return store_from_json(j);
}

inline void save_store(const TagStore& store, const std::string& path) { write_text_file(path, dump_store(store)); }

inline TagStore load_store(const std::string& path) {
  auto in = open_input(path);
  return parse_store(in);
}

inline json quantify_to_json(const QuantifyResult& q) {
  json counts = json::array();
  for (const auto& row : q.cooccurrence.counts) counts.push_back(json(std::vector<std::uint64_t>(row.begin(), row.end())));
  return {{"cooccurrence", std::move(counts)},
          {"weights", detail::matrix_json(q.factors.weights)},
          {"features", detail::matrix_json(q.factors.features)},
          {"k", q.factors.k},
          {"final_error", q.factors.final_error},
          {"iterations", q.factors.iterations},
          {"orderings", detail::matrix_json(q.orderings)},
          {"symmetric", detail::matrix_json(q.symmetric)},
          {"values", q.values.values}};
}

inline json quantify_dump(const QuantifyResult& strategy, const QuantifyResult& presentation) {
  return {{std::string(attribute_name(NominalAttribute::strategy)), quantify_to_json(strategy)},
          {std::string(attribute_name(NominalAttribute::presentation)), quantify_to_json(presentation)}};
}

struct QuantifiedValues {
  AttributeValueMap strategy;
  AttributeValueMap presentation;
};

// Reads the `values` arrays back from a quantification dump.
inline QuantifiedValues load_values(const std::string& path) {
  auto in = open_input(path);
  try {
    const json j = json::parse(in);
    QuantifiedValues out;
    out.strategy.values = j.at("strategy").at("values").get<std::vector<double>>();
    out.presentation.values = j.at("presentation").at("values").get<std::vector<double>>();
    if (out.strategy.size() != kNominalLevels || out.presentation.size() != kNominalLevels)
      throw ValidationError("expected 5 values per attribute");
    return out;
  } catch (const json::exception& e) {
    throw ValidationError("values file '" + path + "': " + e.what());
  }
}

inline json lattice_to_json(const std::map<std::string, std::vector<FrequentItemset<AttributeItem>>, std::less<>>& lattice) {
  json j = json::object();
  for (const auto& [id, itemsets] : lattice) {
    json list = json::array();
    for (const auto& f : itemsets) {
      json items = json::array();
      for (const auto& item : f.items) items.push_back({item.attribute, item.value});
      list.push_back({{"items", std::move(items)}, {"count", f.count}, {"support", f.support}});
    }
    j[id] = std::move(list);
  }
  return j;
}

}  // namespace lptag
