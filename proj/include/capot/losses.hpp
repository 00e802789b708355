/*
 * Copyright 2026 The capot Authors.
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

#ifndef CAPOT_LOSSES_HPP_
#define CAPOT_LOSSES_HPP_

#include <span>

#include "capot/encoder.hpp"

namespace capot {

struct LossWeights {
  double tau_positive = 1.0;
  double tau_negative = 0.1;
  double tau_anchor = 2.0;
  double tau_ranking = 1.0;
  double tau_contrastive = 1.0;
  double eps_contrastive = 0.5;
  double eps_anchor = 0.0;
  double eps_ranking = 0.1;

  // Throws UsageError unless every field is finite and nonnegative.
  void validate() const;
};

// All hinges below take the zero branch at the kink.

// max(0, tau_pos*|x-pos|^2 - tau_neg*|x-neg|^2 + eps)
struct ContrastiveTerm {
  double loss = 0.0;
  double pre_hinge = 0.0;
  Embedding grad_x, grad_pos, grad_neg;
};
ContrastiveTerm contrastive_loss(std::span<const double> x,
                                 std::span<const double> pos,
                                 std::span<const double> neg,
                                 const LossWeights& w);

// max(0, |x - x_frozen|^2 + eps_anchor). The frozen side gets no gradient.
struct AnchorTerm {
  double loss = 0.0;
  Embedding grad_x;
};
AnchorTerm anchor_loss(std::span<const double> x,
                       std::span<const double> x_frozen, const LossWeights& w);

// max(0, -(score_pos - score_anchor) + eps_ranking)
struct RankingTerm {
  double loss = 0.0;
  double pre_hinge = 0.0;
  double grad_score_pos = 0.0;
  double grad_score_anchor = 0.0;
};
RankingTerm ranking_loss(double score_pos, double score_anchor,
                         const LossWeights& w);

struct LossBreakdown {
  double contrastive = 0.0;
  double anchor = 0.0;
  double ranking = 0.0;
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& o) {
    contrastive += o.contrastive;
    anchor += o.anchor;
    ranking += o.ranking;
    total += o.total;
    return *this;
  }
};

// Weighted sum of the three terms for one (clean, noisy, negative) triple.
// Ranking scores are <pos, x> against <x_frozen, x>. Gradients are with
// respect to the trainable embeddings x, pos and neg.
struct CapotTerm {
  LossBreakdown breakdown;
  Embedding grad_x, grad_pos, grad_neg;
};
CapotTerm capot_loss(std::span<const double> x, std::span<const double> pos,
                     std::span<const double> neg,
                     std::span<const double> x_frozen, const LossWeights& w);

}  // namespace capot

#endif  // CAPOT_LOSSES_HPP_
