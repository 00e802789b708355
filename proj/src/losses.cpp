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

#include "capot/losses.hpp"

#include <cmath>
#include <string>

#include "capot/errors.hpp"

namespace capot {
namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

void LossWeights::validate() const {
  const double fields[] = {tau_positive,  tau_negative,    tau_anchor,
                           tau_ranking,   tau_contrastive, eps_contrastive,
                           eps_anchor,    eps_ranking};
  for (double f : fields) {
    if (!std::isfinite(f) || f < 0.0) {
      throw UsageError("loss weights must be finite and nonnegative");
    }
  }
}

ContrastiveTerm contrastive_loss(std::span<const double> x,
                                 std::span<const double> pos,
                                 std::span<const double> neg,
                                 const LossWeights& w) {
  require_same_dim(x.size(), pos.size(), "contrastive_loss");
  require_same_dim(x.size(), neg.size(), "contrastive_loss");
  ContrastiveTerm t;
  t.pre_hinge = w.tau_positive * squared_distance(x, pos) -
                w.tau_negative * squared_distance(x, neg) + w.eps_contrastive;
  t.grad_x.assign(x.size(), 0.0);
  t.grad_pos.assign(x.size(), 0.0);
  t.grad_neg.assign(x.size(), 0.0);
  if (t.pre_hinge <= 0.0) return t;
  t.loss = t.pre_hinge;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double to_pos = 2.0 * w.tau_positive * (x[i] - pos[i]);
    const double to_neg = 2.0 * w.tau_negative * (x[i] - neg[i]);
    t.grad_x[i] = to_pos - to_neg;
    t.grad_pos[i] = -to_pos;
    t.grad_neg[i] = to_neg;
  }
  return t;
}

AnchorTerm anchor_loss(std::span<const double> x,
                       std::span<const double> x_frozen, const LossWeights& w) {
  require_same_dim(x.size(), x_frozen.size(), "anchor_loss");
  AnchorTerm t;
  const double pre = squared_distance(x, x_frozen) + w.eps_anchor;
  t.grad_x.assign(x.size(), 0.0);
  if (pre <= 0.0) return t;
  t.loss = pre;
  for (std::size_t i = 0; i < x.size(); ++i) {
    t.grad_x[i] = 2.0 * (x[i] - x_frozen[i]);
  }
  return t;
}

RankingTerm ranking_loss(double score_pos, double score_anchor,
                         const LossWeights& w) {
  if (!std::isfinite(score_pos) || !std::isfinite(score_anchor)) {
    throw std::invalid_argument("ranking_loss: non-finite score");
  }
  RankingTerm t;
  t.pre_hinge = -(score_pos - score_anchor) + w.eps_ranking;
  if (t.pre_hinge <= 0.0) return t;
  t.loss = t.pre_hinge;
  t.grad_score_pos = -1.0;
  t.grad_score_anchor = 1.0;
  return t;
}

CapotTerm capot_loss(std::span<const double> x, std::span<const double> pos,
                     std::span<const double> neg,
                     std::span<const double> x_frozen, const LossWeights& w) {
  require_same_dim(x.size(), x_frozen.size(), "capot_loss");
  const ContrastiveTerm c = contrastive_loss(x, pos, neg, w);
  const AnchorTerm a = anchor_loss(x, x_frozen, w);
  const RankingTerm r = ranking_loss(dot(pos, x), dot(x_frozen, x), w);

  CapotTerm t;
  t.breakdown.contrastive = c.loss;
  t.breakdown.anchor = a.loss;
  t.breakdown.ranking = r.loss;
  t.breakdown.total = w.tau_contrastive * c.loss + w.tau_anchor * a.loss +
                      w.tau_ranking * r.loss;
  const std::size_t n = x.size();
  t.grad_x.assign(n, 0.0);
  t.grad_pos.assign(n, 0.0);
  t.grad_neg.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.grad_x[i] = w.tau_contrastive * c.grad_x[i] + w.tau_anchor * a.grad_x[i] +
                  w.tau_ranking * (r.grad_score_pos * pos[i] +
                                   r.grad_score_anchor * x_frozen[i]);
    t.grad_pos[i] = w.tau_contrastive * c.grad_pos[i] +
                    w.tau_ranking * r.grad_score_pos * x[i];
    t.grad_neg[i] = w.tau_contrastive * c.grad_neg[i];
  }
  return t;
}

}  // namespace capot
