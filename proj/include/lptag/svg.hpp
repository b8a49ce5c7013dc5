#pragma once

// SVG figures: a strip chart of quantified nominal values and a parallel
// coordinates plot of a resource's clustered learners.

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lptag/cluster.hpp"
#include "lptag/error.hpp"
#include "lptag/quantify.hpp"

namespace lptag::svg {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

namespace detail {

inline std::string pair_list(const PairSet& set, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < set.pairs.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(set.pairs[i].first) + "-" + std::to_string(set.pairs[i].second);
  }
  return out;
}

}  // namespace detail

/// 1-D strip chart of the parameters' quantified values. The nearest and
/// farthest parameter pairs are annotated, both as text and in `data-pairs`
/// attributes on the `#nearest` / `#farthest` groups.
inline std::string export_values(const AttributeValueMap& values, std::string_view attribute_label) {
  const auto report = similarity_report(values);
  constexpr double left = 60.0, right = 580.0, axis_y = 110.0;
  double lo = values.values.front(), hi = lo;
  for (double v : values.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::string s;
  s += R"(<?xml version="1.0" encoding="UTF-8"?>)" "\n";
  s += R"(<svg xmlns="http://www.w3.org/2000/svg" width="640" height="220" viewBox="0 0 640 220">)" "\n";
  s += R"(<rect width="640" height="220" fill="white"/>)" "\n";
  s += R"(<text x="320" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">)" +
       escape(attribute_label) + "</text>\n";
  s += R"(<line x1=")" + num(left) + R"(" y1=")" + num(axis_y) + R"(" x2=")" + num(right) + R"(" y2=")" + num(axis_y) +
       R"(" stroke="black"/>)" "\n";
  s += R"(<text x=")" + num(left) + R"(" y="132" text-anchor="middle" font-family="sans-serif" font-size="10">)" +
       num(lo) + "</text>\n";
  s += R"(<text x=")" + num(right) + R"(" y="132" text-anchor="middle" font-family="sans-serif" font-size="10">)" +
       num(hi) + "</text>\n";

  std::vector<double> xs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = left + normalize_coordinate(values.values[i], lo, hi) * (right - left);
    int stacked = 0;
    for (double prev : xs)
      if (prev == x) ++stacked;
    xs.push_back(x);
    const std::string param = std::to_string(i + 1);
    s += R"(<circle class="param" data-param=")" + param + R"(" data-value=")" + exact(values.values[i]) +
         R"(" cx=")" + num(x) + R"(" cy=")" + num(axis_y) + R"(" r="6" fill=")" + kPalette[i % kPalette.size()] +
         R"("/>)" "\n";
    s += R"(<text x=")" + num(x) + R"(" y=")" + num(axis_y - 12.0 - 14.0 * stacked) +
         R"(" text-anchor="middle" font-family="sans-serif" font-size="12">)" + param + "</text>\n";
  }

  const auto annotate = [&](const char* id, const char* label, const PairSet& set, double y) {
    s += R"(<g id=")" + std::string(id) + R"(" data-distance=")" + exact(set.distance) + R"(" data-pairs=")" +
         detail::pair_list(set, " ") + R"(">)";
    s += R"(<text x="60" y=")" + num(y) + R"(" font-family="sans-serif" font-size="12">)" + label + ": " +
         escape(detail::pair_list(set, ", ")) + " (distance " + num(set.distance) + ")</text></g>\n";
  };
  annotate("nearest", "Most similar", report.nearest, 170.0);
  annotate("farthest", "Least similar", report.farthest, 190.0);
  s += "</svg>\n";
  return s;
}

inline constexpr std::array<const char*, kProfileDims> kAxisLabels = {
    "Current skill", "Target skill", "Learning strategy", "Presentation style", "Learning time (h)"};

inline constexpr double kParTop = 50.0;
inline constexpr double kParBottom = 350.0;
inline constexpr double kParLeft = 80.0;
inline constexpr double kParSpacing = 160.0;

/// Parallel coordinates: one vertical axis per attribute, scaled min (bottom)
/// to max (top), one polyline per learner colored by cluster index.
/// `assignment` is parallel to `points`; pass an empty span for one color.
inline std::string export_parcoords(const std::vector<FeaturePoint>& points, std::span<const std::size_t> assignment,
                                    std::string_view title = "") {
  if (points.empty()) throw ValidationError("parallel coordinates need at least one point");
  if (!assignment.empty() && assignment.size() != points.size())
    throw ValidationError("assignment size does not match point count");
  const auto spec = fit_normalization(points);

  std::string s;
  s += R"(<?xml version="1.0" encoding="UTF-8"?>)" "\n";
  s += R"(<svg xmlns="http://www.w3.org/2000/svg" width="800" height="400" viewBox="0 0 800 400">)" "\n";
  s += R"(<rect width="800" height="400" fill="white"/>)" "\n";
  if (!title.empty()) {
    s += R"(<text x="400" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">)" + escape(title) +
         "</text>\n";
  }
  for (std::size_t d = 0; d < kProfileDims; ++d) {
    const std::string x = num(kParLeft + kParSpacing * static_cast<double>(d));
    s += R"(<line class="axis" data-axis=")" + std::to_string(d) + R"(" x1=")" + x + R"(" y1=")" + num(kParTop) +
         R"(" x2=")" + x + R"(" y2=")" + num(kParBottom) + R"(" stroke="black"/>)" "\n";
    s += R"(<text x=")" + x + R"(" y="38" text-anchor="middle" font-family="sans-serif" font-size="11">)" +
         std::string(kAxisLabels[d]) + " (max " + num(spec.max[d]) + ")</text>\n";
    s += R"(<text x=")" + x + R"(" y="368" text-anchor="middle" font-family="sans-serif" font-size="11">min )" +
         num(spec.min[d]) + "</text>\n";
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t cluster = assignment.empty() ? 0 : assignment[i];
    std::string coords;
    for (std::size_t d = 0; d < kProfileDims; ++d) {
      const double t = normalize_coordinate(points[i].coords[d], spec.min[d], spec.max[d]);
      if (d) coords += ' ';
      coords += num(kParLeft + kParSpacing * static_cast<double>(d)) + "," + num(kParBottom - t * (kParBottom - kParTop));
    }
    s += R"(<polyline class="learner" data-learner=")" + escape(points[i].learner_id) + R"(" data-cluster=")" +
         std::to_string(cluster) + R"(" points=")" + coords + R"(" fill="none" stroke-opacity="0.6" stroke=")" +
         kPalette[cluster % kPalette.size()] + R"("/>)" "\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace lptag::svg
