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

#include "xfertune/ranking.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xfertune/error.h"

namespace xfertune {

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kDiversityIndex: return "di";
    case Metric::kStdDev: return "sd";
    case Metric::kVariance: return "var";
  }
  return "unknown";
}

double DiversityIndex(std::span<const double> values) {
  std::vector<double> normalized = NormalizeColumn(values);
  std::sort(normalized.begin(), normalized.end());
  double range = normalized.back() - normalized.front();
  double inverse_frequency_sum = 0;
  for (size_t i = 0; i < normalized.size();) {
    size_t j = i;
    while (j < normalized.size() && normalized[j] == normalized[i]) ++j;
    inverse_frequency_sum += 1.0 / static_cast<double>(j - i);
    i = j;
  }
  return range * inverse_frequency_sum;
}

double Variance(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewValues,
                "sample variance needs at least two values");
  }
  double n = static_cast<double>(values.size());
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sum_sq = 0;
  for (double v : values) sum_sq += (v - mean) * (v - mean);
  return sum_sq / (n - 1);
}

double StdDev(std::span<const double> values) {
  return std::sqrt(Variance(values));
}

std::vector<double> AttributeColumn(const LogTable& table,
                                    std::span<const size_t> rows,
                                    Attribute attribute) {
  std::vector<double> column;
  column.reserve(rows.size());
  for (size_t row : rows) column.push_back(KeyOf(table[row]).Get(attribute));
  return column;
}

std::vector<AttributeScore> RankAttributes(
    const LogTable& table, std::span<const size_t> rows,
    std::span<const Attribute> candidates, const RankOptions& options) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyTable, "cannot rank attributes of no logs");
  }
  std::vector<AttributeScore> scores;
  for (Attribute attribute : candidates) {
    std::vector<double> column = AttributeColumn(table, rows, attribute);
    double score = 0;
    switch (options.metric) {
      case Metric::kDiversityIndex:
        score = DiversityIndex(column);
        break;
      case Metric::kStdDev:
      case Metric::kVariance: {
        if (options.normalize_spread) column = NormalizeColumn(column);
        score = options.metric == Metric::kStdDev ? StdDev(column)
                                                  : Variance(column);
        break;
      }
    }
    scores.push_back({attribute, score, options.metric});
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const AttributeScore& a, const AttributeScore& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return static_cast<int>(a.attribute) <
                            static_cast<int>(b.attribute);
                   });
  return scores;
}

std::vector<AttributeScore> RankAttributes(const LogTable& table,
                                           Metric metric) {
  std::vector<size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), size_t{0});
  RankOptions options;
  options.metric = metric;
  return RankAttributes(table, rows, kAllAttributes, options);
}

}  // namespace xfertune
