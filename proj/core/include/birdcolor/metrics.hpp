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

#ifndef BIRDCOLOR_METRICS_HPP_
#define BIRDCOLOR_METRICS_HPP_

#include <cstddef>
#include <span>

#include "birdcolor/matrix.hpp"

namespace birdcolor {

// Recording-level scores and binary ground truth, both [n x C].
struct EvalBatch {
  Matrix scores;
  Matrix truth;
  double threshold = 0.5;  // F1 binarisation: positive iff score >= threshold
};

// Unweighted mean over classes with at least one positive of the per-class
// F1 (0 when precision + recall is 0). Throws kInvalidArgument if no class
// has a positive or the threshold is outside (0, 1).
double macro_f1(const EvalBatch& batch);

// Mean per-class Mann-Whitney AUC (ties count 1/2) over classes that have
// both positives and negatives.
double macro_roc_auc(const EvalBatch& batch);

// Class-averaged mean average precision. Per class the samples are ranked by
// descending score, equal scores keeping their original order, and
// AP = sum_k precision@k * rel(k) / n_positives. Classes without positives
// are skipped.
double cmap(const EvalBatch& batch);

struct WilcoxonResult {
  std::size_t n = 0;     // non-zero differences
  double w_plus = 0.0;   // rank sum of positive differences
  double p_value = 1.0;  // exact one-sided P(W+ >= observed) under H0
};

// One-tailed Wilcoxon signed-rank test of H1: treatment > control, paired.
// Zero differences are dropped; tied |differences| share average ranks and
// the null distribution is enumerated exactly with those ranks.
WilcoxonResult wilcoxon_signed_rank_greater(std::span<const double> treatment,
                                            std::span<const double> control);

}  // namespace birdcolor

#endif  // BIRDCOLOR_METRICS_HPP_
