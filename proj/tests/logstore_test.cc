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

#include "xfertune/logstore.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <string>

#include "test_util.h"
#include "xfertune/error.h"

namespace xfertune {
namespace {

using testing::Table1;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(ParseLogs, ReadsTable1) {
  const LogTable& t = *Table1();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t[0].entry_no, 1);
  EXPECT_DOUBLE_EQ(t[0].throughput_mbps, 5);
  EXPECT_DOUBLE_EQ(t[0].energy_j, 20);
  EXPECT_EQ(t[6].theta, (TunableParams{3, 4, 4, 4, 1.5}));
  EXPECT_EQ(t.RowOf(10), 9u);
  EXPECT_FALSE(t.RowOf(11).has_value());
}

TEST(ParseLogs, HeaderOnlyIsEmptyTable) {
  EXPECT_EQ(CodeOf([] { ParseLogs(std::string(kCsvHeader) + "\n"); }),
            ErrorCode::kEmptyTable);
}

TEST(ParseLogs, NonNumericFieldNamesColumn) {
  std::string csv = std::string(kCsvHeader) +
                    "\n1,100,250,10,200,10,5,abc,1,2,2,2,1.3\n";
  try {
    ParseLogs(csv);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonNumericField);
    EXPECT_NE(std::string(e.what()).find("energy_j"), std::string::npos);
  }
}

TEST(ParseLogs, MissingColumnAndDuplicates) {
  EXPECT_EQ(CodeOf([] { ParseLogs("entry_no,file_size_kb\n1,2\n"); }),
            ErrorCode::kMissingColumn);
  std::string dup = std::string(kCsvHeader) +
                    "\n1,100,250,10,200,10,5,20,1,2,2,2,1.3"
                    "\n1,100,250,10,200,10,5,20,1,2,2,2,1.3\n";
  EXPECT_EQ(CodeOf([&] { ParseLogs(dup); }), ErrorCode::kDuplicateEntryNo);
}

TEST(ParseLogs, ColumnOrderIsFree) {
  std::string csv =
      "energy_j,entry_no,file_size_kb,num_files,rtt_ms,buf_size_mb,"
      "bandwidth_mbps,throughput_mbps,cc,p,pp,cpu_num,cpu_freq_ghz\n"
      "20,1,100,250,10,200,10,5,1,2,2,2,1.3\n";
  LogTable t = ParseLogs(csv);
  EXPECT_EQ(t[0], (*Table1())[0]);
}

TEST(WriteLogs, RoundTripsTable1) {
  LogTable again = ParseLogs(WriteLogs(*Table1()));
  ASSERT_EQ(again.size(), Table1()->size());
  for (size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i], (*Table1())[i]);
}

TEST(WriteLogs, RoundTripsRandomReals) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.001, 1e5);
  std::vector<TransferLogEntry> entries;
  for (int i = 1; i <= 200; ++i) {
    TransferLogEntry e;
    e.entry_no = i;
    e.file_size_kb = u(rng);
    e.num_files = i * 3;
    e.rtt_ms = u(rng);
    e.buf_size_mb = u(rng);
    e.bandwidth_mbps = u(rng);
    e.throughput_mbps = u(rng);
    e.energy_j = u(rng);
    e.theta = {1 + i % 7, 2, 3, 4, 1.2 + 0.3 * (i % 5)};
    entries.push_back(e);
  }
  LogTable t(entries, "random");
  LogTable again = ParseLogs(WriteLogs(t));
  for (size_t i = 0; i < t.size(); ++i) EXPECT_EQ(again[i], t[i]);
}

TEST(NormalizeColumn, BandwidthColumn) {
  std::vector<double> in = {10, 15, 20, 5, 8};
  std::vector<double> want = {0.5, 0.75, 1.0, 0.25, 0.4};
  auto out = NormalizeColumn(in);
  ASSERT_EQ(out.size(), want.size());
  for (size_t i = 0; i < want.size(); ++i) EXPECT_DOUBLE_EQ(out[i], want[i]);
  EXPECT_EQ(NormalizeColumn(std::vector<double>{7}),
            std::vector<double>{1.0});
  EXPECT_EQ(NormalizeColumn(std::vector<double>{3, 3, 3}),
            (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(NormalizeColumn, Errors) {
  EXPECT_EQ(CodeOf([] { NormalizeColumn(std::vector<double>{}); }),
            ErrorCode::kEmptyInput);
  EXPECT_EQ(CodeOf([] { NormalizeColumn(std::vector<double>{1, 0}); }),
            ErrorCode::kNonPositiveValue);
}

TEST(NormalizeColumn, ScaleInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + trial % 9);
    for (double& v : x) v = u(rng);
    double k = u(rng);
    std::vector<double> kx = x;
    for (double& v : kx) v *= k;
    auto a = NormalizeColumn(x);
    auto b = NormalizeColumn(kx);
    for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(KeyOf, ProjectsAttributes) {
  const LogTable& t = *Table1();
  EXPECT_EQ(KeyOf(t[0]), (AttributeKey{100, 250, 10, 200, 10}));
  EXPECT_EQ(KeyOf(t[4]), (AttributeKey{150, 225, 15, 150, 8}));
  EXPECT_EQ(KeyOf(t[0]), KeyOf(t[5]));
}

TEST(Validate, FlagsThroughputAboveBandwidth) {
  EXPECT_TRUE(Validate(*Table1()).empty());
  TransferLogEntry e = (*Table1())[0];
  e.throughput_mbps = 50;
  auto issues = Validate(LogTable({e}, "x"));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].entry_no, 1);
}

TEST(ClassifyDataset, ReferenceDatasets) {
  EXPECT_EQ(ClassifyDataset(SmallDataset()), SizeClass::kSmall);
  EXPECT_EQ(ClassifyDataset(MediumDataset()), SizeClass::kMedium);
  EXPECT_EQ(ClassifyDataset(LargeDataset()), SizeClass::kLarge);
  EXPECT_NEAR(SmallDataset().avg_file_size_kb(), 101.92, 1e-9);
}

TEST(ClassifyDataset, MonotoneInAverage) {
  SizeClass prev = SizeClass::kSmall;
  for (double avg = 1; avg < 1e10; avg *= 1.3) {
    SizeClass c = ClassifyAverageFileSize(avg);
    EXPECT_GE(static_cast<int>(c), static_cast<int>(prev));
    prev = c;
  }
  EXPECT_EQ(ClassifyAverageFileSize(kMiB - 1), SizeClass::kSmall);
  EXPECT_EQ(ClassifyAverageFileSize(kMiB), SizeClass::kMedium);
  EXPECT_EQ(ClassifyAverageFileSize(64 * kMiB), SizeClass::kLarge);
}

TEST(DatasetSpec, OnePercentRule) {
  EXPECT_NO_THROW(DatasetSpec::FromAverage("ok", 100, 1000, 100500));
  EXPECT_EQ(CodeOf([] { DatasetSpec::FromAverage("bad", 100, 1000, 120000); }),
            ErrorCode::kInvalidArgument);
  DatasetSpec empty = DatasetSpec::FromTotal("empty", 0, 0);
  EXPECT_EQ(empty.total_size_bytes, 0);
}

}  // namespace
}  // namespace xfertune
