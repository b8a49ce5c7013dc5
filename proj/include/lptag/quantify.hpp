#pragma once

// Numeric values for the nominal profile attributes (learning strategy and
// presentation style):
//
//   learner-pair co-occurrence counts A (5x5)
//     -> NMF  A ~= B * C            (B: 5 x k weights, C: k x 5 features)
//     -> D[i] = C[argmax_f B[i][f]] (dominant feature row per parameter)
//     -> D_sym = min(D, D^T)
//     -> value[i] = mean of row i of D_sym

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lptag/error.hpp"
#include "lptag/ingest.hpp"
#include "lptag/matrix.hpp"

namespace lptag {

enum class NominalAttribute { strategy, presentation };

inline std::string_view attribute_name(NominalAttribute a) {
  return a == NominalAttribute::strategy ? "strategy" : "presentation";
}

inline NominalAttribute parse_attribute(std::string_view name) {
  if (name == "strategy" || name == "a3") return NominalAttribute::strategy;
  if (name == "presentation" || name == "a4") return NominalAttribute::presentation;
  throw ValidationError("unknown nominal attribute '" + std::string(name) + "'");
}

inline int nominal_value(const LearnerProfile& p, NominalAttribute a) {
  return a == NominalAttribute::strategy ? p.strategy : p.presentation;
}

struct CooccurrenceMatrix {
  NominalAttribute attribute = NominalAttribute::strategy;
  std::array<std::array<std::uint64_t, kNominalLevels>, kNominalLevels> counts{};

  // 1-based parameters.
  std::uint64_t at(int i, int j) const { return counts.at(i - 1).at(j - 1); }

  Matrix as_matrix() const {
    Matrix m(kNominalLevels, kNominalLevels);
    for (int i = 0; i < kNominalLevels; ++i)
      for (int j = 0; j < kNominalLevels; ++j) m(i, j) = static_cast<double>(counts[i][j]);
    return m;
  }
};

/// Counts unordered pairs of distinct learners sharing at least one subset,
/// keyed by their two parameter values. A pair is counted once globally no
/// matter how many subsets it shares. Off-diagonal pairs add 1 to both
/// (i, j) and (j, i).
inline CooccurrenceMatrix build_cooccurrence(std::span<const LearnerSubset> subsets, const ProfileIndex& profiles,
                                             NominalAttribute attribute) {
  CooccurrenceMatrix out;
  out.attribute = attribute;

  std::unordered_map<std::string_view, std::uint32_t> index;
  std::vector<int> param;
  std::vector<std::vector<std::uint32_t>> members(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (const auto& id : subsets[s].members) {
      auto [it, inserted] = index.try_emplace(id, static_cast<std::uint32_t>(param.size()));
      if (inserted) {
        const auto p = profiles.find(id);
        if (p == profiles.end()) throw ValidationError("no profile for learner '" + id + "'");
        param.push_back(nominal_value(p->second, attribute) - 1);
      }
      members[s].push_back(it->second);
    }
  }

  const std::size_t n = param.size();
  std::vector<std::vector<std::uint32_t>> memberships(n);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    if (members[s].size() < 2) continue;
    for (auto u : members[s]) memberships[u].push_back(static_cast<std::uint32_t>(s));
  }

  // mark[v] == u + 1 once the pair (u, v) has been counted.
  std::vector<std::uint32_t> mark(n, 0);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (auto s : memberships[u]) {
      for (auto v : members[s]) {
        if (v <= u || mark[v] == u + 1) continue;
        mark[v] = u + 1;
        const int i = param[u];
        const int j = param[v];
        ++out.counts[i][j];
        if (i != j) ++out.counts[j][i];
      }
    }
  }
  return out;
}

struct NmfOptions {
  int k = 10;
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct FactorPair {
  Matrix weights;   // B, rows x k
  Matrix features;  // C, k x cols
  int k = 0;
  double final_error = 0.0;          // ||A - B C||_F
  std::vector<double> error_trace;   // initial error, then one entry per iteration
  int iterations = 0;
};

inline constexpr double kNmfEpsilon = 1e-12;

/// Lee-Seung multiplicative updates for min ||A - B C||_F^2 with B, C >= 0.
/// Both factors start uniform in (0, 1]. Stops when the relative error
/// improvement drops below `tol` or after `max_iters` iterations.
inline FactorPair nmf(const Matrix& a, const NmfOptions& opts) {
  if (opts.k < 1) throw ValidationError("nmf: k must be >= 1");
  if (opts.max_iters < 1) throw ValidationError("nmf: max_iters must be >= 1");
  bool all_zero = true;
  for (double v : a.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("nmf: input must be finite and non-negative");
    if (v != 0.0) all_zero = false;
  }

  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const auto k = static_cast<std::size_t>(opts.k);
  FactorPair f{Matrix(m, k), Matrix(k, n), opts.k, 0.0, {}, 0};
  if (all_zero) {
    f.error_trace.push_back(0.0);
    return f;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& x : f.weights.data()) x = 1.0 - unit(rng);
  for (double& x : f.features.data()) x = 1.0 - unit(rng);

  auto& b = f.weights;
  auto& c = f.features;
  double err = frobenius_distance(a, multiply(b, c));
  f.error_trace.push_back(err);

  for (int it = 0; it < opts.max_iters; ++it) {
    {
      const Matrix bt = b.transpose();
      const Matrix num = multiply(bt, a);
      const Matrix den = multiply(multiply(bt, b), c);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) *= num(i, j) / (den(i, j) + kNmfEpsilon);
    }
    {
      const Matrix ct = c.transpose();
      const Matrix num = multiply(a, ct);
      const Matrix den = multiply(b, multiply(c, ct));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) b(i, j) *= num(i, j) / (den(i, j) + kNmfEpsilon);
    }
    const double prev = err;
    err = frobenius_distance(a, multiply(b, c));
    f.error_trace.push_back(err);
    f.iterations = it + 1;
    if (err == 0.0 || prev == 0.0 || (prev - err) / prev < opts.tol) break;
  }
  f.final_error = err;
  return f;
}

using SimilarityMatrix = Matrix;

/// Row i of the result is the feature row of C selected by the largest weight
/// in row i of B (ties and all-zero rows pick the lowest feature index).
inline SimilarityMatrix derive_orderings(const FactorPair& f) {
  const Matrix& b = f.weights;
  const Matrix& c = f.features;
  SimilarityMatrix d(b.rows(), c.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.cols(); ++j)
      if (b(i, j) > b(i, best)) best = j;
    const auto src = c.row(best);
    std::copy(src.begin(), src.end(), d.row(i).begin());
  }
  return d;
}

inline SimilarityMatrix symmetrize(const SimilarityMatrix& d) {
  if (!d.square()) throw ValidationError("symmetrize: matrix must be square");
  SimilarityMatrix out(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) out(i, j) = std::min(d(i, j), d(j, i));
  return out;
}

// Quantified value per nominal parameter; parameters are 1-based.
struct AttributeValueMap {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double at(int param) const {
    if (param < 1 || static_cast<std::size_t>(param) > values.size())
      throw ValidationError("no quantified value for parameter " + std::to_string(param));
    return values[static_cast<std::size_t>(param - 1)];
  }

  friend bool operator==(const AttributeValueMap&, const AttributeValueMap&) = default;
};

inline AttributeValueMap attribute_values(const SimilarityMatrix& d_sym) {
  AttributeValueMap out;
  out.values.reserve(d_sym.rows());
  for (std::size_t i = 0; i < d_sym.rows(); ++i) {
    double sum = 0.0;
    for (double v : d_sym.row(i)) sum += v;
    out.values.push_back(d_sym.cols() ? sum / static_cast<double>(d_sym.cols()) : 0.0);
  }
  return out;
}

struct QuantifyResult {
  CooccurrenceMatrix cooccurrence;
  FactorPair factors;
  SimilarityMatrix orderings;
  SimilarityMatrix symmetric;
  AttributeValueMap values;
};

inline QuantifyResult quantify_attribute_detailed(std::span<const LearnerSubset> subsets, const ProfileIndex& profiles,
                                                  NominalAttribute attribute, const NmfOptions& opts) {
  QuantifyResult r;
  r.cooccurrence = build_cooccurrence(subsets, profiles, attribute);
  r.factors = nmf(r.cooccurrence.as_matrix(), opts);
  r.orderings = derive_orderings(r.factors);
  r.symmetric = symmetrize(r.orderings);
  r.values = attribute_values(r.symmetric);
  return r;
}

inline AttributeValueMap quantify_attribute(std::span<const LearnerSubset> subsets, const ProfileIndex& profiles,
                                            NominalAttribute attribute, const NmfOptions& opts) {
  return quantify_attribute_detailed(subsets, profiles, attribute, opts).values;
}

// Parameter pairs (1-based, i < j) at the extreme pairwise value distance.
struct PairSet {
  double distance = 0.0;
  std::vector<std::pair<int, int>> pairs;
};

struct SimilarityReport {
  PairSet nearest;
  PairSet farthest;
};

/// Exhaustive scan of |v_i - v_j|; exact ties are all reported.
inline SimilarityReport similarity_report(const AttributeValueMap& values) {
  if (values.size() < 2) throw ValidationError("similarity report needs at least two parameters");
  SimilarityReport r;
  r.nearest.distance = std::numeric_limits<double>::infinity();
  r.farthest.distance = -1.0;
  const int n = static_cast<int>(values.size());
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double d = std::abs(values.at(i) - values.at(j));
      if (d < r.nearest.distance) r.nearest = {d, {}};
      if (d == r.nearest.distance) r.nearest.pairs.emplace_back(i, j);
      if (d > r.farthest.distance) r.farthest = {d, {}};
      if (d == r.farthest.distance) r.farthest.pairs.emplace_back(i, j);
    }
  }
  return r;
}

}  // namespace lptag
