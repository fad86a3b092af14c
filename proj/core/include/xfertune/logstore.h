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

#ifndef XFERTUNE_LOGSTORE_H_
#define XFERTUNE_LOGSTORE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xfertune {

// The five search attributes identifying a transfer context, in canonical
// order. The order doubles as the ranking tie-break.
enum class Attribute : int {
  kFileSize = 0,
  kNumFiles = 1,
  kRtt = 2,
  kBufSize = 3,
  kBandwidth = 4,
};

inline constexpr int kNumAttributes = 5;
inline constexpr std::array<Attribute, kNumAttributes> kAllAttributes = {
    Attribute::kFileSize, Attribute::kNumFiles, Attribute::kRtt,
    Attribute::kBufSize, Attribute::kBandwidth};

// Stable identifiers used in CSV headers, JSON models and CLI output.
std::string_view AttributeName(Attribute attribute);
std::optional<Attribute> AttributeFromName(std::string_view name);

struct AttributeKey {
  double file_size_kb = 0;
  double num_files = 0;
  double rtt_ms = 0;
  double buf_size_mb = 0;
  double bandwidth_mbps = 0;

  double Get(Attribute attribute) const;
  void Set(Attribute attribute, double value);
  bool AllPositive() const;

  friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

// θ: the decision variables of a transfer.
struct TunableParams {
  int cc = 1;
  int p = 1;
  int pp = 1;
  int cpu_num = 1;
  double cpu_freq_ghz = 1.0;

  int streams() const { return cc * p; }
  std::string ToString() const;

  friend bool operator==(const TunableParams&, const TunableParams&) = default;
};

struct TransferLogEntry {
  int64_t entry_no = 0;
  double file_size_kb = 0;
  int64_t num_files = 0;
  double rtt_ms = 0;
  double buf_size_mb = 0;
  double bandwidth_mbps = 0;
  double throughput_mbps = 0;
  double energy_j = 0;
  TunableParams theta;

  friend bool operator==(const TransferLogEntry&,
                         const TransferLogEntry&) = default;
};

AttributeKey KeyOf(const TransferLogEntry& entry);

// Ordered, immutable-after-construction collection of log entries.
class LogTable {
 public:
  LogTable() = default;
  // Throws kDuplicateEntryNo when two entries share an entry_no.
  LogTable(std::vector<TransferLogEntry> entries, std::string provenance);

  std::span<const TransferLogEntry> entries() const { return entries_; }
  const TransferLogEntry& operator[](size_t row) const { return entries_[row]; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& provenance() const { return provenance_; }

  // Row index of an entry_no, if present.
  std::optional<size_t> RowOf(int64_t entry_no) const;

  // Subset of rows in the given order, keeping provenance.
  LogTable Select(std::span<const size_t> rows) const;

 private:
  std::vector<TransferLogEntry> entries_;
  std::string provenance_;
  std::vector<std::pair<int64_t, size_t>> index_;  // sorted by entry_no
};

inline constexpr std::string_view kCsvHeader =
    "entry_no,file_size_kb,num_files,rtt_ms,buf_size_mb,bandwidth_mbps,"
    "throughput_mbps,energy_j,cc,p,pp,cpu_num,cpu_freq_ghz";

// Parses the canonical CSV schema. Columns are located by header name, so
// column order is free as long as every canonical column is present.
LogTable ParseLogs(std::string_view csv_text, std::string provenance = "csv");
std::string WriteLogs(const LogTable& table);

LogTable ReadLogFile(const std::string& path);
void WriteLogFile(const LogTable& table, const std::string& path);

struct ValidationIssue {
  int64_t entry_no;
  std::string message;
};

// Soft checks that flag but never reject: throughput above link bandwidth,
// non-positive fields.
std::vector<ValidationIssue> Validate(const LogTable& table);

// c_i / max(c). Throws kEmptyInput or kNonPositiveValue.
std::vector<double> NormalizeColumn(std::span<const double> values);

enum class SizeClass { kSmall, kMedium, kLarge };

std::string_view SizeClassName(SizeClass size_class);

inline constexpr double kKiB = 1024.0;
inline constexpr double kMiB = 1024.0 * 1024.0;
inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

struct DatasetSpec {
  std::string name;
  int64_t num_files = 0;
  double total_size_bytes = 0;
  double avg_file_size_bytes = 0;

  // Derives the average from the total. Zero files gives a zero-byte set.
  static DatasetSpec FromTotal(std::string name, int64_t num_files,
                               double total_size_bytes);
  // Throws kInvalidArgument when avg × n is more than 1% off the total.
  static DatasetSpec FromAverage(std::string name, int64_t num_files,
                                 double avg_file_size_bytes,
                                 double total_size_bytes);

  SizeClass size_class() const;
  double avg_file_size_kb() const { return avg_file_size_bytes / kKiB; }
};

// Small below 1 MiB average file size, Medium below 64 MiB, Large otherwise.
SizeClass ClassifyDataset(const DatasetSpec& spec);
SizeClass ClassifyAverageFileSize(double avg_file_size_bytes);

// The three reference datasets (HTML, image and video collections).
DatasetSpec SmallDataset();
DatasetSpec MediumDataset();
DatasetSpec LargeDataset();
std::optional<DatasetSpec> DatasetByName(std::string_view name);

}  // namespace xfertune

#endif  // XFERTUNE_LOGSTORE_H_
