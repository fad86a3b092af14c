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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "test_util.h"
#include "xfertune/error.h"

namespace xfertune {
namespace {

using testing::Table1;

std::vector<double> Column(Attribute a) {
  std::vector<size_t> rows(Table1()->size());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return AttributeColumn(*Table1(), rows, a);
}

// Values computed by an independent script over table1.csv.
TEST(DiversityIndex, Table1Columns) {
  EXPECT_NEAR(DiversityIndex(Column(Attribute::kBandwidth)), 1.875, 1e-12);
  EXPECT_NEAR(DiversityIndex(Column(Attribute::kFileSize)), 1.2833333333333334,
              1e-12);
  EXPECT_NEAR(DiversityIndex(Column(Attribute::kRtt)), 1.05, 1e-12);
  EXPECT_NEAR(DiversityIndex(Column(Attribute::kNumFiles)), 0.7, 1e-12);
  EXPECT_NEAR(DiversityIndex(Column(Attribute::kBufSize)), 0.7, 1e-12);
  EXPECT_EQ(DiversityIndex(std::vector<double>{5, 5, 5}), 0.0);
}

TEST(DiversityIndex, Errors) {
  EXPECT_THROW(DiversityIndex(std::vector<double>{}), Error);
  EXPECT_THROW(DiversityIndex(std::vector<double>{1, -2}), Error);
}

TEST(DiversityIndex, ScaleInvariantAndZeroIffConstant) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + trial % 12);
    for (double& v : x) v = pick(rng) * 2.5;
    std::vector<double> kx = x;
    for (double& v : kx) v *= 8.0;
    double di = DiversityIndex(x);
    EXPECT_NEAR(di, DiversityIndex(kx), 1e-12);
    bool constant = std::adjacent_find(x.begin(), x.end(),
                                       std::not_equal_to<>()) == x.end();
    EXPECT_EQ(di == 0.0, constant);
  }
}

TEST(StdDev, Examples) {
  EXPECT_NEAR(StdDev(std::vector<double>{0, 2}), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(StdDev(std::vector<double>{1, 2, 3}), 1.0);
  EXPECT_EQ(StdDev(std::vector<double>{4.2, 4.2, 4.2}), 0.0);
  EXPECT_DOUBLE_EQ(Variance(std::vector<double>{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(Variance(std::vector<double>{0, 2}), 2.0);
  EXPECT_EQ(Variance(std::vector<double>{3, 3}), 0.0);
  try {
    StdDev(std::vector<double>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewValues);
  }
}

TEST(StdDev, ScaleShiftAndVarianceProperties) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(3, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + trial % 20);
    for (double& v : x) v = n(rng);
    double sd = StdDev(x);
    std::vector<double> kx = x, sx = x;
    for (double& v : kx) v *= -3.0;
    for (double& v : sx) v += 17.0;
    EXPECT_NEAR(StdDev(kx), 3.0 * sd, 1e-9 * (1 + sd));
    EXPECT_NEAR(StdDev(sx), sd, 1e-9 * (1 + sd));
    double var = Variance(x);
    EXPECT_LE(std::abs(var - sd * sd), 1e-12 * std::max(1.0, var));
  }
}

TEST(RankAttributes, Table1DiPutsBandwidthFirst) {
  auto ranked = RankAttributes(*Table1(), Metric::kDiversityIndex);
  ASSERT_EQ(ranked.size(), 5u);
  EXPECT_EQ(ranked[0].attribute, Attribute::kBandwidth);
  EXPECT_NEAR(ranked[0].score, 1.875, 1e-12);
  EXPECT_EQ(ranked[1].attribute, Attribute::kFileSize);
  EXPECT_EQ(ranked[2].attribute, Attribute::kRtt);
  // Tied at 0.7: canonical order decides.
  EXPECT_EQ(ranked[3].attribute, Attribute::kNumFiles);
  EXPECT_EQ(ranked[4].attribute, Attribute::kBufSize);
}

TEST(RankAttributes, Table1StdDevOnNormalizedColumns) {
  auto ranked = RankAttributes(*Table1(), Metric::kStdDev);
  EXPECT_EQ(ranked[0].attribute, Attribute::kBandwidth);
  EXPECT_NEAR(ranked[0].score, 0.2800793538346667, 1e-12);
  EXPECT_EQ(ranked[1].attribute, Attribute::kFileSize);
  EXPECT_NEAR(ranked[1].score, 0.27897519691511496, 1e-12);
  EXPECT_EQ(ranked[2].attribute, Attribute::kRtt);
}

LogTable TableWhere(const std::function<void(TransferLogEntry&, int)>& edit) {
  std::vector<TransferLogEntry> entries;
  for (int i = 0; i < 6; ++i) {
    TransferLogEntry e;
    e.entry_no = i + 1;
    e.file_size_kb = 10;
    e.num_files = 10;
    e.rtt_ms = 10;
    e.buf_size_mb = 10;
    e.bandwidth_mbps = 10;
    e.throughput_mbps = 1;
    e.energy_j = 1;
    edit(e, i);
    entries.push_back(e);
  }
  return LogTable(entries, "t");
}

TEST(RankAttributes, ConstantColumnsKeepCanonicalOrder) {
  LogTable t = TableWhere([](TransferLogEntry&, int) {});
  for (Metric m : {Metric::kDiversityIndex, Metric::kStdDev}) {
    auto ranked = RankAttributes(t, m);
    for (int i = 0; i < kNumAttributes; ++i) {
      EXPECT_EQ(ranked[i].attribute, kAllAttributes[i]);
      EXPECT_EQ(ranked[i].score, 0.0);
    }
  }
}

TEST(RankAttributes, OnlyVaryingAttributeWins) {
  LogTable t = TableWhere([](TransferLogEntry& e, int i) { e.rtt_ms = 5 + i; });
  EXPECT_EQ(RankAttributes(t, Metric::kDiversityIndex)[0].attribute,
            Attribute::kRtt);
  EXPECT_EQ(RankAttributes(t, Metric::kStdDev)[0].attribute, Attribute::kRtt);
}

}  // namespace
}  // namespace xfertune
