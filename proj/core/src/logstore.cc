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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xfertune/error.h"

namespace xfertune {

std::string_view AttributeName(Attribute attribute) {
  switch (attribute) {
    case Attribute::kFileSize: return "file_size";
    case Attribute::kNumFiles: return "num_files";
    case Attribute::kRtt: return "rtt";
    case Attribute::kBufSize: return "buf_size";
    case Attribute::kBandwidth: return "bandwidth";
  }
  return "unknown";
}

std::optional<Attribute> AttributeFromName(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (AttributeName(a) == name) return a;
  }
  return std::nullopt;
}

double AttributeKey::Get(Attribute attribute) const {
  switch (attribute) {
    case Attribute::kFileSize: return file_size_kb;
    case Attribute::kNumFiles: return num_files;
    case Attribute::kRtt: return rtt_ms;
    case Attribute::kBufSize: return buf_size_mb;
    case Attribute::kBandwidth: return bandwidth_mbps;
  }
  return 0;
}

void AttributeKey::Set(Attribute attribute, double value) {
  switch (attribute) {
    case Attribute::kFileSize: file_size_kb = value; break;
    case Attribute::kNumFiles: num_files = value; break;
    case Attribute::kRtt: rtt_ms = value; break;
    case Attribute::kBufSize: buf_size_mb = value; break;
    case Attribute::kBandwidth: bandwidth_mbps = value; break;
  }
}

bool AttributeKey::AllPositive() const {
  return std::all_of(kAllAttributes.begin(), kAllAttributes.end(),
                     [this](Attribute a) { return Get(a) > 0; });
}

std::string TunableParams::ToString() const {
  std::ostringstream out;
  out << "(" << cc << "," << p << "," << pp << "," << cpu_num << ","
      << cpu_freq_ghz << ")";
  return out.str();
}

AttributeKey KeyOf(const TransferLogEntry& entry) {
  return AttributeKey{entry.file_size_kb, static_cast<double>(entry.num_files),
                      entry.rtt_ms, entry.buf_size_mb, entry.bandwidth_mbps};
}

LogTable::LogTable(std::vector<TransferLogEntry> entries,
                   std::string provenance)
    : entries_(std::move(entries)), provenance_(std::move(provenance)) {
  index_.reserve(entries_.size());
  for (size_t row = 0; row < entries_.size(); ++row) {
    index_.emplace_back(entries_[row].entry_no, row);
  }
  std::sort(index_.begin(), index_.end());
  for (size_t i = 1; i < index_.size(); ++i) {
    if (index_[i].first == index_[i - 1].first) {
      throw Error(ErrorCode::kDuplicateEntryNo,
                  "duplicate entry_no " + std::to_string(index_[i].first));
    }
  }
}

std::optional<size_t> LogTable::RowOf(int64_t entry_no) const {
  auto it = std::lower_bound(
      index_.begin(), index_.end(), entry_no,
      [](const auto& item, int64_t value) { return item.first < value; });
  if (it == index_.end() || it->first != entry_no) return std::nullopt;
  return it->second;
}

LogTable LogTable::Select(std::span<const size_t> rows) const {
  std::vector<TransferLogEntry> subset;
  subset.reserve(rows.size());
  for (size_t row : rows) subset.push_back(entries_.at(row));
  return LogTable(std::move(subset), provenance_);
}

namespace {

constexpr std::array<std::string_view, 13> kColumns = {
    "entry_no", "file_size_kb",    "num_files", "rtt_ms", "buf_size_mb",
    "bandwidth_mbps", "throughput_mbps", "energy_j", "cc", "p",
    "pp",       "cpu_num",         "cpu_freq_ghz"};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void ThrowNonNumeric(size_t row, std::string_view column,
                                  std::string_view text) {
  throw Error(ErrorCode::kNonNumericField,
              "row " + std::to_string(row) + ", column " +
                  std::string(column) + ": '" + std::string(text) +
                  "' is not numeric");
}

double ParseReal(std::string_view text, size_t row, std::string_view column) {
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    ThrowNonNumeric(row, column, text);
  }
  return value;
}

int64_t ParseInteger(std::string_view text, size_t row,
                     std::string_view column) {
  int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    // Accept integral reals such as "4.0" written by other tools.
    double real = ParseReal(text, row, column);
    if (real != std::floor(real)) ThrowNonNumeric(row, column, text);
    return static_cast<int64_t>(real);
  }
  return value;
}

void AppendReal(std::string& out, double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, ptr);
}

}  // namespace

LogTable ParseLogs(std::string_view csv_text, std::string provenance) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= csv_text.size()) {
    size_t newline = csv_text.find('\n', start);
    std::string_view line = csv_text.substr(
        start, newline == std::string_view::npos ? std::string_view::npos
                                                 : newline - start);
    if (!Trim(line).empty()) lines.push_back(line);
    if (newline == std::string_view::npos) break;
    start = newline + 1;
  }
  if (lines.empty()) {
    throw Error(ErrorCode::kMissingColumn, "missing CSV header");
  }

  std::vector<std::string_view> header = SplitFields(lines.front());
  std::array<size_t, kColumns.size()> position{};
  for (size_t c = 0; c < kColumns.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "missing column '" + std::string(kColumns[c]) + "'");
    }
    position[c] = static_cast<size_t>(it - header.begin());
  }
  if (lines.size() == 1) {
    throw Error(ErrorCode::kEmptyTable, "log table has no data rows");
  }

  std::vector<TransferLogEntry> entries;
  entries.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> fields = SplitFields(lines[i]);
    if (fields.size() < header.size()) {
      throw Error(ErrorCode::kMissingColumn,
                  "row " + std::to_string(i) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    auto field = [&](size_t c) { return fields[position[c]]; };
    auto real = [&](size_t c) { return ParseReal(field(c), i, kColumns[c]); };
    auto integer = [&](size_t c) {
      return ParseInteger(field(c), i, kColumns[c]);
    };
    TransferLogEntry e;
    e.entry_no = integer(0);
    e.file_size_kb = real(1);
    e.num_files = integer(2);
    e.rtt_ms = real(3);
    e.buf_size_mb = real(4);
    e.bandwidth_mbps = real(5);
    e.throughput_mbps = real(6);
    e.energy_j = real(7);
    e.theta.cc = static_cast<int>(integer(8));
    e.theta.p = static_cast<int>(integer(9));
    e.theta.pp = static_cast<int>(integer(10));
    e.theta.cpu_num = static_cast<int>(integer(11));
    e.theta.cpu_freq_ghz = real(12);
    entries.push_back(e);
  }
  return LogTable(std::move(entries), std::move(provenance));
}

std::string WriteLogs(const LogTable& table) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const TransferLogEntry& e : table.entries()) {
    out += std::to_string(e.entry_no);
    out.push_back(',');
    AppendReal(out, e.file_size_kb);
    out.push_back(',');
    out += std::to_string(e.num_files);
    out.push_back(',');
    AppendReal(out, e.rtt_ms);
    out.push_back(',');
    AppendReal(out, e.buf_size_mb);
    out.push_back(',');
    AppendReal(out, e.bandwidth_mbps);
    out.push_back(',');
    AppendReal(out, e.throughput_mbps);
    out.push_back(',');
    AppendReal(out, e.energy_j);
    for (int v : {e.theta.cc, e.theta.p, e.theta.pp, e.theta.cpu_num}) {
      out.push_back(',');
      out += std::to_string(v);
    }
    out.push_back(',');
    AppendReal(out, e.theta.cpu_freq_ghz);
    out.push_back('\n');
  }
  return out;
}

LogTable ReadLogFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseLogs(buffer.str(), path);
}

void WriteLogFile(const LogTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << WriteLogs(table);
}

std::vector<ValidationIssue> Validate(const LogTable& table) {
  std::vector<ValidationIssue> issues;
  for (const TransferLogEntry& e : table.entries()) {
    if (e.throughput_mbps > e.bandwidth_mbps) {
      issues.push_back({e.entry_no, "throughput exceeds link bandwidth"});
    }
    bool positive = e.entry_no > 0 && e.file_size_kb > 0 && e.num_files > 0 &&
                    e.rtt_ms > 0 && e.buf_size_mb > 0 &&
                    e.bandwidth_mbps > 0 && e.throughput_mbps > 0 &&
                    e.energy_j > 0 && e.theta.cc >= 1 && e.theta.p >= 1 &&
                    e.theta.pp >= 1 && e.theta.cpu_num >= 1 &&
                    e.theta.cpu_freq_ghz > 0;
    if (!positive) {
      issues.push_back({e.entry_no, "non-positive numeric field"});
    }
  }
  return issues;
}

std::vector<double> NormalizeColumn(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot normalize an empty column");
  }
  double max_value = 0;
  for (double v : values) {
    if (!(v > 0)) {
      throw Error(ErrorCode::kNonPositiveValue,
                  "normalization requires positive values");
    }
    max_value = std::max(max_value, v);
  }
  std::vector<double> normalized;
  normalized.reserve(values.size());
  for (double v : values) normalized.push_back(v / max_value);
  return normalized;
}

std::string_view SizeClassName(SizeClass size_class) {
  switch (size_class) {
    case SizeClass::kSmall: return "small";
    case SizeClass::kMedium: return "medium";
    case SizeClass::kLarge: return "large";
  }
  return "unknown";
}

DatasetSpec DatasetSpec::FromTotal(std::string name, int64_t num_files,
                                   double total_size_bytes) {
  if (num_files < 0 || total_size_bytes < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative dataset size");
  }
  DatasetSpec spec;
  spec.name = std::move(name);
  spec.num_files = num_files;
  spec.total_size_bytes = num_files == 0 ? 0 : total_size_bytes;
  spec.avg_file_size_bytes =
      num_files == 0 ? 0 : total_size_bytes / static_cast<double>(num_files);
  return spec;
}

DatasetSpec DatasetSpec::FromAverage(std::string name, int64_t num_files,
                                     double avg_file_size_bytes,
                                     double total_size_bytes) {
  double implied = avg_file_size_bytes * static_cast<double>(num_files);
  if (num_files <= 0 || avg_file_size_bytes <= 0 ||
      std::abs(implied - total_size_bytes) > 0.01 * total_size_bytes) {
    throw Error(ErrorCode::kInvalidArgument,
                "average file size × file count deviates more than 1% from "
                "the total size");
  }
  DatasetSpec spec;
  spec.name = std::move(name);
  spec.num_files = num_files;
  spec.total_size_bytes = total_size_bytes;
  spec.avg_file_size_bytes = avg_file_size_bytes;
  return spec;
}

SizeClass DatasetSpec::size_class() const { return ClassifyDataset(*this); }

SizeClass ClassifyAverageFileSize(double avg_file_size_bytes) {
  if (avg_file_size_bytes < 1 * kMiB) return SizeClass::kSmall;
  if (avg_file_size_bytes < 64 * kMiB) return SizeClass::kMedium;
  return SizeClass::kLarge;
}

SizeClass ClassifyDataset(const DatasetSpec& spec) {
  return ClassifyAverageFileSize(spec.avg_file_size_bytes);
}

DatasetSpec SmallDataset() {
  return DatasetSpec::FromAverage("small", 20000, 101.92 * kKiB, 1.94 * kGiB);
}

DatasetSpec MediumDataset() {
  return DatasetSpec::FromAverage("medium", 5000, 2.40 * kMiB, 11.70 * kGiB);
}

DatasetSpec LargeDataset() {
  return DatasetSpec::FromAverage("large", 128, 222.78 * kMiB, 27.85 * kGiB);
}

std::optional<DatasetSpec> DatasetByName(std::string_view name) {
  if (name == "small") return SmallDataset();
  if (name == "medium") return MediumDataset();
  if (name == "large") return LargeDataset();
  return std::nullopt;
}

}  // namespace xfertune
