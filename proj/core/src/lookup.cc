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

#include "xfertune/lookup.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "xfertune/error.h"
#include "xfertune/model_io.h"

namespace xfertune {

AxisQuantization AxisQuantization::Uniform(double origin, double width,
                                           size_t count) {
  if (!(width > 0) || count == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "uniform quantization needs a positive width and count");
  }
  AxisQuantization axis;
  for (size_t i = 0; i < count; ++i) {
    axis.centers.push_back(origin + static_cast<double>(i) * width);
  }
  axis.lo = origin - 0.5 * width;
  axis.hi = axis.centers.back() + 0.5 * width;
  return axis;
}

AxisQuantization AxisQuantization::FromValues(std::vector<double> values,
                                              double margin) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "quantization needs values");
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  AxisQuantization axis;
  axis.centers = std::move(values);
  axis.lo = axis.centers.front() * (1.0 - margin);
  axis.hi = axis.centers.back() * (1.0 + margin);
  return axis;
}

std::optional<size_t> AxisQuantization::Snap(double v) const {
  if (centers.empty() || v < lo || v > hi) return std::nullopt;
  auto it = std::lower_bound(centers.begin(), centers.end(), v);
  if (it == centers.end()) return centers.size() - 1;
  size_t upper = static_cast<size_t>(it - centers.begin());
  if (upper == 0) return 0;
  // Halfway values go to the lower bucket.
  return v - centers[upper - 1] <= centers[upper] - v ? upper - 1 : upper;
}

namespace {

AxisQuantization BuildTargetAxis(const LogTable& table, SurfaceMetric metric,
                            double bin_width, size_t max_targets) {
  double lo = BinLabel(MetricValue(table[0], metric), bin_width);
  double hi = lo;
  for (const TransferLogEntry& e : table.entries()) {
    double label = BinLabel(MetricValue(e, metric), bin_width);
    lo = std::min(lo, label);
    hi = std::max(hi, label);
  }
  lo = std::max(lo, bin_width);
  double width = bin_width;
  auto count = [&] {
    return static_cast<size_t>(std::floor((hi - lo) / width + 1e-9)) + 1;
  };
  if (count() > max_targets) {
    width = bin_width * std::ceil(static_cast<double>(count()) /
                                  static_cast<double>(max_targets));
  }
  return AxisQuantization::Uniform(lo, width, count());
}

}  // namespace

Quantization Quantization::FromTable(const LogTable& table,
                                     const SurfaceOptions& options,
                                     double rtt_width, size_t max_targets) {
  if (table.empty()) {
    throw Error(ErrorCode::kEmptyModel, "cannot quantize an empty table");
  }
  Quantization q;
  for (Attribute a : kAllAttributes) {
    std::vector<double> values;
    values.reserve(table.size());
    for (const TransferLogEntry& e : table.entries()) {
      values.push_back(KeyOf(e).Get(a));
    }
    if (a == Attribute::kRtt) {
      auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
      double lo = std::max(rtt_width, std::floor(*min_it * 0.8 / rtt_width) *
                                          rtt_width);
      double hi = std::ceil(*max_it * 1.2 / rtt_width) * rtt_width;
      auto count = static_cast<size_t>(std::llround((hi - lo) / rtt_width)) + 1;
      q.key_axes[static_cast<int>(a)] =
          AxisQuantization::Uniform(lo, rtt_width, count);
    } else {
      q.key_axes[static_cast<int>(a)] =
          AxisQuantization::FromValues(std::move(values));
    }
  }
  q.throughput_targets = BuildTargetAxis(table, SurfaceMetric::kThroughput,
                                    options.throughput_bin_width, max_targets);
  q.energy_targets = BuildTargetAxis(table, SurfaceMetric::kEnergy,
                                options.energy_bin_width, max_targets);
  return q;
}

AttributeKey LookupTable::CenterKey(
    const std::array<size_t, kNumAttributes>& index) const {
  AttributeKey key;
  for (Attribute a : kAllAttributes) {
    int axis = static_cast<int>(a);
    key.Set(a, quantization_.key_axes[axis].centers.at(index[axis]));
  }
  return key;
}

double LookupTable::CenterTarget(size_t target_index, SlaKind kind) const {
  return quantization_.TargetAxis(kind).centers.at(target_index);
}

SlaQuery LookupTable::QueryFor(SlaKind kind, double target) const {
  SlaQuery query = constraints_;
  query.kind = kind;
  query.target = target;
  return query;
}

LookupTable LookupTable::Build(std::shared_ptr<const TreeBand> band,
                               const Quantization& quantization,
                               const SlaQuery& constraints,
                               const SurfaceOptions& options) {
  if (!band || band->table().empty()) {
    throw Error(ErrorCode::kEmptyModel, "lookup table needs a trained band");
  }
  LookupTable lookup;
  lookup.band_ = band;
  lookup.quantization_ = quantization;
  lookup.constraints_ = constraints;
  lookup.options_ = options;
  const LogTable& logs = band->table();

  std::array<size_t, kNumAttributes> dims{};
  size_t cells = 1;
  for (int a = 0; a < kNumAttributes; ++a) {
    dims[a] = quantization.key_axes[a].centers.size();
    cells *= dims[a];
  }
  std::array<size_t, kNumAttributes> index{};
  for (size_t cell = 0; cell < cells; ++cell) {
    size_t rest = cell;
    for (int a = kNumAttributes - 1; a >= 0; --a) {
      index[a] = rest % dims[a];
      rest /= dims[a];
    }
    const AttributeKey key = lookup.CenterKey(index);
    const std::vector<size_t> matched = band->MatchRows(key);

    for (SlaKind kind : {SlaKind::kMaxThroughput, SlaKind::kMinEnergy}) {
      const AxisQuantization& targets = quantization.TargetAxis(kind);
      SlaQuery query = lookup.QueryFor(kind, targets.centers.front());
      std::vector<size_t> feasible;
      for (size_t row : matched) {
        if (query.Admits(logs[row])) feasible.push_back(row);
      }
      if (feasible.empty()) continue;
      SurfaceMetric metric = MetricFor(kind);
      std::vector<SurfaceComponent> components = DecomposeSurface(
          logs, feasible, metric, options.BinWidth(metric));
      // Many targets resolve to the same component; evaluate each once.
      std::vector<std::optional<Recommendation>> evaluated(components.size());
      std::vector<bool> infeasible(components.size(), false);
      for (size_t t = 0; t < targets.centers.size(); ++t) {
        size_t c = FinalSurfaceIndex(components, targets.centers[t], kind);
        if (!evaluated[c] && !infeasible[c]) {
          try {
            evaluated[c] =
                EvaluatePoint(logs, components[c], query, key, options);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kNoFeasiblePoint) throw;
            infeasible[c] = true;
          }
        }
        if (!evaluated[c]) continue;
        Slot slot;
        for (int a = 0; a < kNumAttributes; ++a) {
          slot[a] = static_cast<uint32_t>(index[a]);
        }
        slot[kNumAttributes] = static_cast<uint32_t>(t);
        slot[kNumAttributes + 1] = static_cast<uint32_t>(kind);
        lookup.table_.emplace(slot, *evaluated[c]);
      }
    }
  }
  return lookup;
}

Recommendation LookupTable::Lookup(const AttributeKey& key,
                                   double measured_rtt, double measured_target,
                                   SlaKind kind) const {
  AttributeKey probe = key;
  probe.rtt_ms = measured_rtt;
  Slot slot;
  bool covered = true;
  for (Attribute a : kAllAttributes) {
    int axis = static_cast<int>(a);
    auto snapped = quantization_.key_axes[axis].Snap(probe.Get(a));
    if (!snapped) {
      covered = false;
      break;
    }
    slot[axis] = static_cast<uint32_t>(*snapped);
  }
  if (covered) {
    auto target = quantization_.TargetAxis(kind).Snap(measured_target);
    if (target) {
      slot[kNumAttributes] = static_cast<uint32_t>(*target);
      slot[kNumAttributes + 1] = static_cast<uint32_t>(kind);
      auto it = table_.find(slot);
      if (it != table_.end()) return it->second;
    }
  }
  if (!band_) {
    throw Error(ErrorCode::kModelMiss,
                "lookup miss and no band attached for live search");
  }
  return FindOptimal(*band_, probe, QueryFor(kind, measured_target),
                     options_);
}

std::vector<LookupTable::Entry> LookupTable::Entries() const {
  std::vector<Entry> entries;
  entries.reserve(table_.size());
  for (const auto& [slot, rec] : table_) {
    Entry e;
    for (int a = 0; a < kNumAttributes; ++a) e.key_index[a] = slot[a];
    e.target_index = slot[kNumAttributes];
    e.kind = static_cast<SlaKind>(slot[kNumAttributes + 1]);
    e.recommendation = rec;
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

using nlohmann::json;

json AxisToJson(const AxisQuantization& axis) {
  return {{"centers", axis.centers}, {"lo", axis.lo}, {"hi", axis.hi}};
}

AxisQuantization AxisFromJson(const json& j) {
  AxisQuantization axis;
  axis.centers = j.at("centers").get<std::vector<double>>();
  axis.lo = j.at("lo").get<double>();
  axis.hi = j.at("hi").get<double>();
  if (axis.centers.empty() ||
      !std::is_sorted(axis.centers.begin(), axis.centers.end())) {
    throw Error(ErrorCode::kMalformedModel, "bad quantization axis");
  }
  return axis;
}

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> NumberOrNull(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json RecommendationToJson(const Recommendation& r) {
  return {{"theta",
           {r.theta.cc, r.theta.p, r.theta.pp, r.theta.cpu_num,
            r.theta.cpu_freq_ghz}},
          {"throughput", r.predicted_throughput_mbps},
          {"energy", r.predicted_energy_j},
          {"ids", r.source_entry_ids},
          {"mode", EvalModeName(r.mode)}};
}

Recommendation RecommendationFromJson(const json& j) {
  Recommendation r;
  const json& t = j.at("theta");
  r.theta = {t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(),
             t.at(3).get<int>(), t.at(4).get<double>()};
  r.predicted_throughput_mbps = j.at("throughput").get<double>();
  r.predicted_energy_j = j.at("energy").get<double>();
  r.source_entry_ids = j.at("ids").get<std::vector<int64_t>>();
  r.mode = j.at("mode").get<std::string>() == "polynomial"
               ? EvalMode::kPolynomial
               : EvalMode::kDiscrete;
  return r;
}

}  // namespace

std::string LookupTable::ToJson() const {
  json axes = json::array();
  for (const AxisQuantization& axis : quantization_.key_axes) {
    axes.push_back(AxisToJson(axis));
  }
  json entries = json::array();
  for (const auto& [slot, rec] : table_) {
    entries.push_back({{"slot", slot}, {"rec", RecommendationToJson(rec)}});
  }
  json doc = {
      {"schema_version", kModelSchemaVersion},
      {"kind", "lookup"},
      {"quantization",
       {{"key_axes", axes},
        {"throughput_targets", AxisToJson(quantization_.throughput_targets)},
        {"energy_targets", AxisToJson(quantization_.energy_targets)}}},
      {"constraints",
       {{"energy_cap", OptionalNumber(constraints_.energy_cap)},
        {"throughput_floor", OptionalNumber(constraints_.throughput_floor)},
        {"n_streams_limit", constraints_.n_streams_limit},
        {"pipelining_limit", constraints_.pipelining_limit}}},
      {"options",
       {{"mode", EvalModeName(options_.mode)},
        {"throughput_bin_width", options_.throughput_bin_width},
        {"energy_bin_width", options_.energy_bin_width},
        {"polynomial_min_members", options_.polynomial_min_members},
        {"ridge", options_.ridge}}},
      {"entries", entries}};
  return doc.dump();
}

LookupTable LookupTable::FromJson(std::string_view text,
                                  std::shared_ptr<const TreeBand> band) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedModel, e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorCode::kMalformedModel, "lookup table lacks a version");
  }
  if (doc["schema_version"] != kModelSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "unsupported lookup table version " +
                    doc["schema_version"].dump());
  }
  try {
    LookupTable lookup;
    lookup.band_ = std::move(band);
    const json& q = doc.at("quantization");
    const json& axes = q.at("key_axes");
    if (axes.size() != kNumAttributes) {
      throw Error(ErrorCode::kMalformedModel, "need five key axes");
    }
    for (int a = 0; a < kNumAttributes; ++a) {
      lookup.quantization_.key_axes[a] = AxisFromJson(axes[a]);
    }
    lookup.quantization_.throughput_targets =
        AxisFromJson(q.at("throughput_targets"));
    lookup.quantization_.energy_targets = AxisFromJson(q.at("energy_targets"));
    const json& c = doc.at("constraints");
    lookup.constraints_.energy_cap = NumberOrNull(c.at("energy_cap"));
    lookup.constraints_.throughput_floor =
        NumberOrNull(c.at("throughput_floor"));
    lookup.constraints_.n_streams_limit = c.at("n_streams_limit").get<int>();
    lookup.constraints_.pipelining_limit = c.at("pipelining_limit").get<int>();
    const json& o = doc.at("options");
    lookup.options_.mode = o.at("mode").get<std::string>() == "polynomial"
                               ? EvalMode::kPolynomial
                               : EvalMode::kDiscrete;
    lookup.options_.throughput_bin_width =
        o.at("throughput_bin_width").get<double>();
    lookup.options_.energy_bin_width = o.at("energy_bin_width").get<double>();
    lookup.options_.polynomial_min_members =
        o.at("polynomial_min_members").get<size_t>();
    lookup.options_.ridge = o.at("ridge").get<double>();
    for (const json& e : doc.at("entries")) {
      lookup.table_.emplace(e.at("slot").get<Slot>(),
                            RecommendationFromJson(e.at("rec")));
    }
    return lookup;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedModel, e.what());
  }
}

}  // namespace xfertune
