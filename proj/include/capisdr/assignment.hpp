// Copyright 2026 The capisdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Permutation / selection enumeration and exact rectangular max-assignment.
//
// Two routes solve the same problem: an augmenting-path (Hungarian) solver
// and a literal enumeration over ordered estimate selections paired with
// unordered reference selections. Both return the lexicographically smallest
// optimal pair sequence, so their outputs are directly comparable.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"

namespace capisdr {

using Permutation = std::vector<std::size_t>;
using IndexTuple = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultEnumerationLimit = 3628800;  // 10!
inline constexpr std::size_t kDefaultBruteForceDim = 7;

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

inline std::uint64_t factorial(std::uint64_t n) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r = saturating_mul(r, i);
  return r;
}

inline std::uint64_t falling_factorial(std::uint64_t k, std::uint64_t l) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < l; ++i) r = saturating_mul(r, k - i);
  return r;
}

inline std::uint64_t binomial(std::uint64_t k, std::uint64_t l) {
  if (l > k) return 0;
  l = std::min(l, k - l);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= l; ++i) {
    // r * (k - l + i) / i stays integral at every step.
    const std::uint64_t num = k - l + i;
    const std::uint64_t g = std::gcd(r, i);
    r = saturating_mul(r / g, num / (i / g));
  }
  return r;
}

inline void check_limit(std::uint64_t count, std::uint64_t limit, const char* what) {
  if (count > limit) {
    throw Error(ErrorCode::kSizeLimit, std::string(what) + " would enumerate " +
                                           std::to_string(count) +
                                           " items (limit " +
                                           std::to_string(limit) + ")");
  }
}

}  // namespace detail

// Number of class-preserving permutations: product of factorials of label
// multiplicities.
inline std::uint64_t count_class_permutations(const std::vector<Label>& labels) {
  std::map<Label, std::uint64_t> mult;
  for (const auto& l : labels) ++mult[l];
  std::uint64_t n = 1;
  for (const auto& [label, m] : mult) n = detail::saturating_mul(n, detail::factorial(m));
  return n;
}

// All permutations p with labels[p[k]] == labels[k] for every k, in
// lexicographic order. Indices are 0-based; the identity comes first.
inline std::vector<Permutation> enumerate_class_permutations(
    const std::vector<Label>& labels,
    std::uint64_t limit = kDefaultEnumerationLimit) {
  if (labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "label sequence is empty");
  }
  detail::check_limit(count_class_permutations(labels), limit,
                      "class permutation set");
  const std::size_t k = labels.size();
  std::vector<Permutation> out;
  Permutation current(k);
  std::vector<bool> used(k, false);
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == k) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (used[i] || labels[i] != labels[pos]) continue;
      used[i] = true;
      current[pos] = i;
      self(self, pos + 1);
      used[i] = false;
    }
  };
  recurse(recurse, 0);
  return out;
}

// Ordered selections (k!/(k-l)! tuples) or combinations (C(k,l) tuples,
// strictly increasing) of l distinct indices from {0..k-1}, in lexicographic
// order. l == 0 yields a single empty tuple.
inline std::vector<IndexTuple> enumerate_selections(
    std::size_t k, std::size_t l, bool ordered,
    std::uint64_t limit = kDefaultEnumerationLimit) {
  if (l > k) {
    throw Error(ErrorCode::kInvalidArgument, "selection size exceeds index count");
  }
  detail::check_limit(ordered ? detail::falling_factorial(k, l) : detail::binomial(k, l),
                      limit, "selection set");
  std::vector<IndexTuple> out;
  IndexTuple current(l);
  std::vector<bool> used(k, false);
  auto recurse = [&](auto&& self, std::size_t pos, std::size_t start) -> void {
    if (pos == l) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = ordered ? 0 : start; i < k; ++i) {
      if (used[i]) continue;
      used[i] = true;
      current[pos] = i;
      self(self, pos + 1, i + 1);
      used[i] = false;
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

// Dense row-major score table: rows index estimates, columns references.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw Error(ErrorCode::kInvalidArgument, "score matrix size mismatch");
    }
    validate();
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  void validate() const {
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "score matrix entry is not finite");
      }
    }
  }

  ScoreMatrix transposed() const {
    ScoreMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

using IndexPair = std::pair<std::size_t, std::size_t>;  // (estimate, reference)

struct Assignment {
  std::vector<IndexPair> pairs;  // sorted by estimate index
  double objective = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Sum of scores over the pairs (which are left sorted by estimate). Scores
// are accumulated in ascending value order, so the result depends only on the
// multiset of matched scores: relabeling rows or columns cannot change a bit.
inline double canonical_objective(const ScoreMatrix& m, std::vector<IndexPair>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [r, c] : pairs) scores.push_back(m(r, c));
  std::sort(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += s;
  return acc;
}

// Objectives closer than this are treated as tied; the tie goes to the
// lexicographically smaller pair sequence.
inline double tie_tolerance(const ScoreMatrix& m) {
  double max_abs = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) max_abs = std::max(max_abs, std::abs(m(r, c)));
  const double n = static_cast<double>(std::min(m.rows(), m.cols()));
  return 64.0 * std::numeric_limits<double>::epsilon() * (n + 1.0) * (1.0 + max_abs);
}

namespace detail {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting paths with potentials. cost(r, c) is queried lazily.
template <typename CostFn>
std::vector<std::size_t> hungarian_min(std::size_t n, std::size_t m, CostFn&& cost) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Maximum-score matching of min(|rows|, |cols|) pairs restricted to the given
// row and column subsets.
inline std::vector<IndexPair> max_matching(const ScoreMatrix& m,
                                           const std::vector<std::size_t>& rows,
                                           const std::vector<std::size_t>& cols) {
  std::vector<IndexPair> out;
  if (rows.empty() || cols.empty()) return out;
  if (rows.size() <= cols.size()) {
    auto r2c = hungarian_min(rows.size(), cols.size(), [&](std::size_t i, std::size_t j) {
      return -m(rows[i], cols[j]);
    });
    for (std::size_t i = 0; i < rows.size(); ++i) out.emplace_back(rows[i], cols[r2c[i]]);
  } else {
    auto c2r = hungarian_min(cols.size(), rows.size(), [&](std::size_t i, std::size_t j) {
      return -m(rows[j], cols[i]);
    });
    for (std::size_t i = 0; i < cols.size(); ++i) out.emplace_back(rows[c2r[i]], cols[i]);
  }
  return out;
}

}  // namespace detail

// Picks min(rows, cols) disjoint (estimate, reference) pairs maximizing the
// summed score. Among (near-)optimal pair sets the lexicographically smallest
// pair sequence wins.
inline Assignment solve_max_assignment(const ScoreMatrix& m) {
  m.validate();
  Assignment result;
  const std::size_t n = std::min(m.rows(), m.cols());
  if (n == 0) return result;

  std::vector<std::size_t> all_rows(m.rows()), all_cols(m.cols());
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::iota(all_cols.begin(), all_cols.end(), 0);
  std::vector<IndexPair> current = detail::max_matching(m, all_rows, all_cols);
  const double best = canonical_objective(m, current);
  const double tol = tie_tolerance(m);

  // Walk the pair sequence front to back; at each position take the smallest
  // pair that still admits an optimal completion.
  std::vector<IndexPair> prefix;
  std::vector<bool> col_used(m.cols(), false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t first_row = prefix.empty() ? 0 : prefix.back().first + 1;
    const std::size_t need_after = n - j - 1;
    bool settled = false;
    for (std::size_t r = first_row; r < m.rows() && !settled; ++r) {
      if (m.rows() - r - 1 < need_after) break;
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (col_used[c]) continue;
        if (IndexPair{r, c} == current[j]) {
          settled = true;
          break;
        }
        std::vector<std::size_t> rest_rows, rest_cols;
        for (std::size_t rr = r + 1; rr < m.rows(); ++rr) rest_rows.push_back(rr);
        for (std::size_t cc = 0; cc < m.cols(); ++cc)
          if (!col_used[cc] && cc != c) rest_cols.push_back(cc);
        if (std::min(rest_rows.size(), rest_cols.size()) < need_after) continue;
        std::vector<IndexPair> candidate = prefix;
        candidate.emplace_back(r, c);
        if (need_after > 0) {
          auto tail = detail::max_matching(m, rest_rows, rest_cols);
          candidate.insert(candidate.end(), tail.begin(), tail.end());
        }
        if (candidate.size() != n) continue;
        if (canonical_objective(m, candidate) >= best - tol) {
          current = std::move(candidate);
          settled = true;
          break;
        }
      }
    }
    prefix.push_back(current[j]);
    col_used[current[j].second] = true;
  }
  result.pairs = std::move(current);
  result.objective = canonical_objective(m, result.pairs);
  return result;
}

// Literal enumeration: estimates are selected with order (sigma), references
// without order (pi), pair i = (sigma[i], pi[i]). Intended as a test oracle.
inline Assignment solve_max_assignment_bruteforce(
    const ScoreMatrix& m, std::size_t max_dim = kDefaultBruteForceDim,
    std::uint64_t limit = 50'000'000) {
  m.validate();
  const std::size_t n = std::min(m.rows(), m.cols());
  if (n > max_dim) {
    throw Error(ErrorCode::kSizeLimit, "brute-force assignment dimension " +
                                           std::to_string(n) + " exceeds " +
                                           std::to_string(max_dim));
  }
  detail::check_limit(detail::saturating_mul(detail::falling_factorial(m.rows(), n),
                                             detail::binomial(m.cols(), n)),
                      limit, "brute-force assignment");
  Assignment result;
  if (n == 0) return result;

  const auto sigmas = enumerate_selections(m.rows(), n, /*ordered=*/true, limit);
  const auto pis = enumerate_selections(m.cols(), n, /*ordered=*/false, limit);
  auto for_each_candidate = [&](auto&& visit) {
    std::vector<IndexPair> pairs(n);
    for (const auto& sigma : sigmas) {
      for (const auto& pi : pis) {
        for (std::size_t i = 0; i < n; ++i) pairs[i] = {sigma[i], pi[i]};
        const double obj = canonical_objective(m, pairs);
        visit(pairs, obj);
      }
    }
  };
  double best = -std::numeric_limits<double>::infinity();
  for_each_candidate([&](const std::vector<IndexPair>&, double obj) { best = std::max(best, obj); });
  const double tol = tie_tolerance(m);
  bool have = false;
  for_each_candidate([&](const std::vector<IndexPair>& pairs, double obj) {
    if (obj < best - tol) return;
    if (!have || pairs < result.pairs) {
      result.pairs = pairs;
      result.objective = obj;
      have = true;
    }
  });
  return result;
}

}  // namespace capisdr
