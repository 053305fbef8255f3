/*
 * Copyright 2026 The birdcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "birdcolor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "birdcolor/error.hpp"

namespace birdcolor {
namespace {

void CheckShapes(const EvalBatch& batch) {
  Require(batch.scores.rows() == batch.truth.rows() && batch.scores.cols() == batch.truth.cols(),
          ErrorCode::kShapeMismatch, "score and truth shapes differ");
  Require(batch.scores.rows() > 0 && batch.scores.cols() > 0, ErrorCode::kInvalidArgument,
          "empty evaluation batch");
}

std::size_t Positives(const EvalBatch& batch, std::size_t c) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < batch.truth.rows(); ++i) n += batch.truth(i, c) > 0.5 ? 1 : 0;
  return n;
}

}  // namespace

double macro_f1(const EvalBatch& batch) {
  CheckShapes(batch);
  Require(batch.threshold > 0.0 && batch.threshold < 1.0, ErrorCode::kInvalidArgument,
          "F1 threshold must lie in (0, 1)");
  double sum = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < batch.scores.cols(); ++c) {
    if (Positives(batch, c) == 0) continue;
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < batch.scores.rows(); ++i) {
      const bool pred = batch.scores(i, c) >= batch.threshold;
      const bool real = batch.truth(i, c) > 0.5;
      tp += pred && real;
      fp += pred && !real;
      fn += !pred && real;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    ++included;
  }
  Require(included > 0, ErrorCode::kInvalidArgument, "no class has a positive label");
  return sum / static_cast<double>(included);
}

double macro_roc_auc(const EvalBatch& batch) {
  CheckShapes(batch);
  const std::size_t n = batch.scores.rows();
  double sum = 0.0;
  std::size_t included = 0;
  std::vector<std::size_t> order(n);
  std::vector<double> rank(n);
  for (std::size_t c = 0; c < batch.scores.cols(); ++c) {
    const std::size_t pos = Positives(batch, c);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) continue;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return batch.scores(a, c) < batch.scores(b, c);
    });
    // Average 1-based ranks over tied groups.
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && batch.scores(order[j + 1], c) == batch.scores(order[i], c)) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (batch.truth(i, c) > 0.5) rank_sum += rank[i];
    }
    const double p = static_cast<double>(pos);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    sum += u / (p * static_cast<double>(neg));
    ++included;
  }
  Require(included > 0, ErrorCode::kInvalidArgument,
          "no class has both positive and negative labels");
  return sum / static_cast<double>(included);
}

double cmap(const EvalBatch& batch) {
  CheckShapes(batch);
  const std::size_t n = batch.scores.rows();
  double sum = 0.0;
  std::size_t included = 0;
  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < batch.scores.cols(); ++c) {
    const std::size_t pos = Positives(batch, c);
    if (pos == 0) continue;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return batch.scores(a, c) > batch.scores(b, c);
    });
    double hits = 0.0;
    double ap = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (batch.truth(order[k], c) > 0.5) {
        hits += 1.0;
        ap += hits / static_cast<double>(k + 1);
      }
    }
    sum += ap / static_cast<double>(pos);
    ++included;
  }
  Require(included > 0, ErrorCode::kInvalidArgument, "no class has a positive label");
  return sum / static_cast<double>(included);
}

WilcoxonResult wilcoxon_signed_rank_greater(std::span<const double> treatment,
                                            std::span<const double> control) {
  Require(treatment.size() == control.size(), ErrorCode::kShapeMismatch,
          "paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < treatment.size(); ++i) {
    const double d = treatment[i] - control[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n = diffs.size();
  if (diffs.empty()) return result;

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  // Doubled ranks are integers even with ties (averages are k or k + 1/2).
  std::vector<std::size_t> doubled(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const std::size_t twice_avg = i + j + 2;
    for (std::size_t k = i; k <= j; ++k) doubled[order[k]] = twice_avg;
    i = j + 1;
  }
  std::size_t observed = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += doubled[i];
    if (diffs[i] > 0.0) observed += doubled[i];
  }
  result.w_plus = static_cast<double>(observed) / 2.0;

  // counts[s] = number of sign assignments whose doubled positive-rank sum is s.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  double tail = 0.0;
  for (std::size_t s = observed; s <= total; ++s) tail += counts[s];
  result.p_value = tail / std::ldexp(1.0, static_cast<int>(n));
  return result;
}

}  // namespace birdcolor
