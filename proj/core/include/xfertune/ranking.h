/*
 * Copyright 2026 The xfertune Authors.
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

#ifndef XFERTUNE_RANKING_H_
#define XFERTUNE_RANKING_H_

#include <span>
#include <string_view>
#include <vector>

#include "xfertune/logstore.h"

namespace xfertune {

enum class Metric { kDiversityIndex, kStdDev, kVariance };

std::string_view MetricName(Metric metric);

struct AttributeScore {
  Attribute attribute;
  double score;
  Metric metric;
};

// Range of the max-normalized values times the sum, over distinct values, of
// 1/frequency. Repeated values are penalized; constant columns score 0.
// Throws kEmptyInput or kNonPositiveValue.
double DiversityIndex(std::span<const double> values);

// Sample statistics with the N-1 denominator. Throw kTooFewValues below 2.
double StdDev(std::span<const double> values);
double Variance(std::span<const double> values);

struct RankOptions {
  Metric metric = Metric::kDiversityIndex;
  // SD/variance on max-normalized columns so that attributes with different
  // units compare on one scale. Raw mode is kept for experimentation.
  bool normalize_spread = true;
};

// Scores every attribute in `candidates` over the given rows of `table` and
// returns them best-first. Ties keep canonical attribute order.
std::vector<AttributeScore> RankAttributes(
    const LogTable& table, std::span<const size_t> rows,
    std::span<const Attribute> candidates, const RankOptions& options);

// Whole-table convenience over all five attributes.
std::vector<AttributeScore> RankAttributes(const LogTable& table,
                                           Metric metric);

std::vector<double> AttributeColumn(const LogTable& table,
                                    std::span<const size_t> rows,
                                    Attribute attribute);

}  // namespace xfertune

#endif  // XFERTUNE_RANKING_H_
