#pragma once

// `lptag` command-line front end. Exit codes: 0 success, 1 validation
// errors (bad flags or data), 2 I/O errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lptag/cluster.hpp"
#include "lptag/error.hpp"
#include "lptag/ingest.hpp"
#include "lptag/pipeline.hpp"
#include "lptag/quantify.hpp"
#include "lptag/serialize.hpp"
#include "lptag/svg.hpp"

namespace lptag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

namespace detail {

struct DataFlags {
  std::string ratings;
  std::string profiles;
  std::uint64_t synth_seed = 0;
  bool synth_seed_given = false;
};

struct Inputs {
  std::vector<RatingRecord> ratings;
  ProfileIndex profiles;
};

inline std::vector<RatingRecord> load_ratings(const std::string& path, std::ostream& err) {
  auto in = open_input(path);
  auto parsed = parse_ratings(in, false);
  if (parsed.malformed) err << "warning: " << path << ": skipped " << parsed.malformed << " malformed rows\n";
  return std::move(parsed.records);
}

/// Without --profiles every learner gets a synthesized profile. With
/// --profiles, an explicit --synth-seed fills in learners missing from it.
inline Inputs load_inputs(const DataFlags& flags, std::ostream& err) {
  Inputs inputs;
  inputs.ratings = load_ratings(flags.ratings, err);
  const auto learners = distinct_learners(inputs.ratings);
  if (flags.profiles.empty()) {
    inputs.profiles = index_profiles(generate_profiles(learners, flags.synth_seed));
    return inputs;
  }
  auto in = open_input(flags.profiles);
  auto parsed = parse_profiles(in);
  for (const auto& r : parsed.rejected)
    err << "warning: " << flags.profiles << ": line " << r.line << ": " << r.reason << "\n";
  inputs.profiles = index_profiles(parsed.profiles);
  if (flags.synth_seed_given) {
    std::vector<std::string> missing;
    for (const auto& id : learners)
      if (!inputs.profiles.contains(id)) missing.push_back(id);
    for (auto& p : generate_profiles(missing, flags.synth_seed)) inputs.profiles.emplace(p.learner_id, std::move(p));
  }
  return inputs;
}

inline void add_data_flags(CLI::App* cmd, DataFlags& flags, bool ratings_required = true) {
  auto* r = cmd->add_option("--ratings", flags.ratings, "Ratings file (\"User-ID\";\"ISBN\";\"Book-Rating\")");
  if (ratings_required) r->required();
  cmd->add_option("--profiles", flags.profiles, "Profiles file (learner_id,a1,a2,a3,a4,a5_hours)");
  cmd->add_option_function<std::uint64_t>(
         "--synth-seed",
         [&flags](std::uint64_t v) {
           flags.synth_seed = v;
           flags.synth_seed_given = true;
         },
         "Seed for synthesized profiles (default 0; used for all learners when --profiles is absent)");
}

inline void add_config_flags(CLI::App* cmd, PipelineConfig& c) {
  cmd->add_option("--delta0", c.delta0, "Rating threshold, subset keeps ratings >= delta0")->capture_default_str();
  cmd->add_option("--support", c.support_sl, "Apriori minimum support level")->capture_default_str();
  cmd->add_option("--features", c.nmf_k, "NMF feature count")->capture_default_str();
  cmd->add_option("--kmax", c.k_max, "Largest k tried by the diameter criterion")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "Average-diameter jump factor")->capture_default_str();
  cmd->add_option("--min-subset", c.min_subset, "Smallest subset that gets tagged")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Pipeline seed (NMF init, first k-means seed)")->capture_default_str();
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

inline std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_csv(const std::vector<std::pair<std::string, KTraceRow>>& rows) {
  std::string s = "resource_id,k,sse,avg_diameter\n";
  for (const auto& [id, row] : rows)
    s += id + "," + std::to_string(row.k) + "," + fmt_exact(row.sse) + "," + fmt_exact(row.avg_diameter) + "\n";
  return s;
}

inline LearnerProfile parse_profile_arg(const std::string& text) {
  std::istringstream in(std::string(kProfilesHeader) + "\nquery," + text + "\n");
  auto parsed = parse_profiles(in);
  if (!parsed.rejected.empty()) throw ValidationError("--profile: " + parsed.rejected.front().reason);
  return parsed.profiles.front();
}

}  // namespace detail

/// Runs one subcommand. Data goes to `out` (or the --out file), diagnostics
/// to `err`.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tag learning resources with the profile attributes of the learners who rate them highly", "lptag"};
  app.require_subcommand(1);

  detail::DataFlags data;
  PipelineConfig config;
  std::string out_path;

  // ingest-check
  bool strict = false;
  auto* check = app.add_subcommand("ingest-check", "Validate ratings (and optionally profiles) and print counts");
  check->add_option("--ratings", data.ratings, "Ratings file")->required();
  check->add_option("--profiles", data.profiles, "Profiles file");
  check->add_flag("--strict", strict, "Abort on the first malformed ratings row");

  // synth-profiles
  auto* synth = app.add_subcommand("synth-profiles", "Write random profiles for every learner in a ratings file");
  detail::add_data_flags(synth, data);
  synth->add_option("--out", out_path, "Output profiles file (default: stdout)");

  // quantify
  auto* quant = app.add_subcommand("quantify", "Quantify learning strategy and presentation style (JSON dump)");
  detail::add_data_flags(quant, data);
  detail::add_config_flags(quant, config);
  quant->add_option("--out", out_path, "Output JSON (default: stdout)");

  // tag
  std::string report_path, trace_path, lattice_path;
  bool keep_skipped = false;
  auto* tag = app.add_subcommand("tag", "Run the full pipeline and write the tag store");
  detail::add_data_flags(tag, data);
  detail::add_config_flags(tag, config);
  tag->add_option("--out", out_path, "Output store JSON")->required();
  tag->add_option("--report", report_path, "Text report, one line per tagged resource");
  tag->add_option("--trace", trace_path, "Per-k (k, sse, avg_diameter) CSV");
  tag->add_option("--lattice", lattice_path, "Frequent-itemset lattice JSON");
  tag->add_flag("--keep-skipped", keep_skipped, "Also write skipped resources (with reason) to the store");

  // match
  std::string store_path, values_path, profile_text, learner_id;
  int top_n = 10;
  auto* match = app.add_subcommand("match", "Rank tagged resources for a learner profile");
  match->add_option("--store", store_path, "Tag store JSON")->required();
  match->add_option("--values", values_path, "Quantification JSON from `quantify`")->required();
  auto* profile_opt = match->add_option("--profile", profile_text, "Profile as a1,a2,a3,a4,a5_hours");
  auto* learner_opt = match->add_option("--learner", learner_id, "Learner id looked up in --profiles");
  match->add_option("--profiles", data.profiles, "Profiles file for --learner");
  match->add_option("--top", top_n, "Number of resources to return")->capture_default_str();
  profile_opt->excludes(learner_opt);

  // export-values
  std::string attribute = "strategy";
  auto* ev = app.add_subcommand("export-values", "SVG strip chart of quantified values with similarity annotations");
  detail::add_data_flags(ev, data, false);
  detail::add_config_flags(ev, config);
  ev->add_option("--values", values_path, "Quantification JSON (otherwise computed from --ratings)");
  ev->add_option("--attribute", attribute, "strategy | presentation")->capture_default_str();
  ev->add_option("--out", out_path, "Output SVG")->required();

  // export-parcoords
  std::string resource_id;
  auto* pc = app.add_subcommand("export-parcoords", "SVG parallel coordinates of one resource's clustered learners");
  detail::add_data_flags(pc, data);
  detail::add_config_flags(pc, config);
  pc->add_option("--resource", resource_id, "Resource id")->required();
  pc->add_option("--values", values_path, "Quantification JSON (otherwise computed)");
  pc->add_option("--trace", trace_path, "Per-k (k, sse, avg_diameter) CSV");
  pc->add_option("--out", out_path, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*check) {
      auto in = open_input(data.ratings);
      const auto parsed = parse_ratings(in, strict);
      out << "ratings: " << parsed.records.size() << " records, " << parsed.dropped_zero << " dropped (rating 0), "
          << parsed.malformed << " malformed\n";
      const auto subsets = build_all_subsets(parsed.records, config.delta0);
      out << "learners: " << distinct_learners(parsed.records).size() << ", resources: " << subsets.size() << "\n";
      if (!data.profiles.empty()) {
        auto pin = open_input(data.profiles);
        const auto profiles = parse_profiles(pin);
        out << "profiles: " << profiles.profiles.size() << " valid, " << profiles.rejected.size() << " rejected, "
            << profiles.duplicates << " duplicates\n";
        for (const auto& r : profiles.rejected) err << data.profiles << ": line " << r.line << ": " << r.reason << "\n";
      }
      return kExitOk;
    }

    if (*synth) {
      const auto ratings = detail::load_ratings(data.ratings, err);
      const auto profiles = generate_profiles(distinct_learners(ratings), data.synth_seed);
      std::ostringstream os;
      render_profiles(os, profiles);
      detail::write_output(out_path, os.str(), out);
      return kExitOk;
    }

    if (*quant) {
      config.validate();
      const auto inputs = detail::load_inputs(data, err);
      const auto subsets = build_all_subsets(inputs.ratings, config.delta0);
      const auto s = quantify_attribute_detailed(subsets, inputs.profiles, NominalAttribute::strategy,
                                                 config.nmf_options(NominalAttribute::strategy));
      const auto p = quantify_attribute_detailed(subsets, inputs.profiles, NominalAttribute::presentation,
                                                 config.nmf_options(NominalAttribute::presentation));
      detail::write_output(out_path, quantify_dump(s, p).dump(2) + "\n", out);
      return kExitOk;
    }

    if (*tag) {
      const auto inputs = detail::load_inputs(data, err);
      auto result = run(config, inputs.ratings, inputs.profiles, {.keep_lattice = !lattice_path.empty()});
      TagStore store = result.store;
      if (keep_skipped) store.insert(result.skipped.begin(), result.skipped.end());
      save_store(store, out_path);
      if (!report_path.empty()) {
        std::ostringstream os;
        write_report(os, result.store);
        write_text_file(report_path, os.str());
      }
      if (!trace_path.empty()) write_text_file(trace_path, detail::trace_csv(result.k_trace));
      if (!lattice_path.empty()) write_text_file(lattice_path, lattice_to_json(result.lattice).dump(2) + "\n");
      err << result.summary() << "\n";
      if (result.store.empty()) err << "no resource qualified for tagging\n";
      return kExitOk;
    }

    if (*match) {
      const auto store = load_store(store_path);
      const auto values = load_values(values_path);
      LearnerProfile profile;
      if (!profile_text.empty()) {
        profile = detail::parse_profile_arg(profile_text);
      } else if (!learner_id.empty()) {
        if (data.profiles.empty()) throw ValidationError("--learner needs --profiles");
        auto in = open_input(data.profiles);
        const auto index = index_profiles(parse_profiles(in).profiles);
        const auto it = index.find(learner_id);
        if (it == index.end()) throw ValidationError("no profile for learner '" + learner_id + "'");
        profile = it->second;
      } else {
        throw ValidationError("one of --profile or --learner is required");
      }
      TagStore tagged;
      for (const auto& [id, cloud] : store)
        if (!cloud.tags.empty()) tagged.emplace(id, cloud);
      for (const auto& m : match_resources(profile, tagged, values.strategy, values.presentation, top_n))
        out << m.resource_id << '\t' << detail::fmt_exact(m.score) << '\n';
      return kExitOk;
    }

    const auto quantified = [&](const std::vector<LearnerSubset>* subsets, const detail::Inputs* inputs) {
      if (!values_path.empty()) return load_values(values_path);
      config.validate();
      QuantifiedValues v;
      v.strategy = quantify_attribute(*subsets, inputs->profiles, NominalAttribute::strategy,
                                      config.nmf_options(NominalAttribute::strategy));
      v.presentation = quantify_attribute(*subsets, inputs->profiles, NominalAttribute::presentation,
                                          config.nmf_options(NominalAttribute::presentation));
      return v;
    };

    if (*ev) {
      const auto which = parse_attribute(attribute);
      QuantifiedValues values;
      if (values_path.empty()) {
        if (data.ratings.empty()) throw ValidationError("export-values needs --values or --ratings");
        const auto inputs = detail::load_inputs(data, err);
        const auto subsets = build_all_subsets(inputs.ratings, config.delta0);
        values = quantified(&subsets, &inputs);
      } else {
        values = load_values(values_path);
      }
      const auto& map = which == NominalAttribute::strategy ? values.strategy : values.presentation;
      const char* label = which == NominalAttribute::strategy ? "Learning strategy" : "Presentation style";
      write_text_file(out_path, svg::export_values(map, label));
      return kExitOk;
    }

    if (*pc) {
      config.validate();
      const auto inputs = detail::load_inputs(data, err);
      const auto subsets = build_all_subsets(inputs.ratings, config.delta0);
      const auto values = quantified(&subsets, &inputs);
      const auto subset = build_subset(inputs.ratings, resource_id, config.delta0);
      if (subset.members.empty()) throw ValidationError("resource '" + resource_id + "' has an empty learner subset");
      const auto raw = to_feature_points(subset, inputs.profiles, values.strategy, values.presentation);
      const auto points = apply_normalization(raw, fit_normalization(raw));
      const auto selection = select_k(points, static_cast<std::size_t>(config.k_max), config.gamma, config.seed,
                                      config.kmeans_max_iters);
      write_text_file(out_path, svg::export_parcoords(raw, selection.clustering.assignment, resource_id));
      if (!trace_path.empty()) {
        std::vector<std::pair<std::string, KTraceRow>> rows;
        for (const auto& row : selection.trace) rows.emplace_back(resource_id, row);
        write_text_file(trace_path, detail::trace_csv(rows));
      }
      err << resource_id << ": " << points.size() << " learners, k = " << selection.clustering.k << "\n";
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace lptag::cli
