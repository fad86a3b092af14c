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

#ifndef XFERTUNE_LOOKUP_H_
#define XFERTUNE_LOOKUP_H_

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/surface.h"

namespace xfertune {

// Bucket centers along one axis plus the closed range the buckets cover.
// Values outside [lo, hi] belong to no bucket.
struct AxisQuantization {
  std::vector<double> centers;  // ascending
  double lo = 0;
  double hi = 0;

  // `count` centers at origin, origin + width, ...; coverage extends half a
  // width past the outer centers.
  static AxisQuantization Uniform(double origin, double width, size_t count);
  // One bucket per distinct value; coverage extends `margin` (relative) past
  // the extreme values.
  static AxisQuantization FromValues(std::vector<double> values,
                                     double margin = 0.1);

  std::optional<size_t> Snap(double v) const;
};

struct Quantization {
  std::array<AxisQuantization, kNumAttributes> key_axes;
  AxisQuantization throughput_targets;
  AxisQuantization energy_targets;

  const AxisQuantization& TargetAxis(SlaKind kind) const {
    return kind == SlaKind::kMaxThroughput ? throughput_targets
                                           : energy_targets;
  }

  // Distinct training values on every key axis except rtt, which gets a
  // uniform grid of `rtt_width` ms padded by 20% on both sides. Target axes
  // follow the surface bin labels, coarsened to at most `max_targets`.
  static Quantization FromTable(const LogTable& table,
                                const SurfaceOptions& options,
                                double rtt_width = 1.0,
                                size_t max_targets = 256);
};

// Precomputed recommendations for every combination of key bucket, target
// bucket and SLA kind. Queries carry the constraint template the table was
// built with; anything not stored falls back to a live search on the band.
class LookupTable {
 public:
  // Throws kEmptyModel when the band has no logs.
  static LookupTable Build(std::shared_ptr<const TreeBand> band,
                           const Quantization& quantization,
                           const SlaQuery& constraints,
                           const SurfaceOptions& options = {});

  // Snaps the key (with measured_rtt in the rtt slot) and measured_target to
  // bucket centers and returns the stored recommendation, or runs
  // FindOptimal on the unsnapped inputs when nothing is stored.
  Recommendation Lookup(const AttributeKey& key, double measured_rtt,
                        double measured_target, SlaKind kind) const;

  // Stored entry for exact bucket indices, if any.
  struct Entry {
    std::array<size_t, kNumAttributes> key_index;
    size_t target_index;
    SlaKind kind;
    Recommendation recommendation;
  };
  std::vector<Entry> Entries() const;
  AttributeKey CenterKey(const std::array<size_t, kNumAttributes>& index) const;
  double CenterTarget(size_t target_index, SlaKind kind) const;
  SlaQuery QueryFor(SlaKind kind, double target) const;

  size_t size() const { return table_.size(); }
  const Quantization& quantization() const { return quantization_; }
  const SurfaceOptions& options() const { return options_; }
  const std::shared_ptr<const TreeBand>& band() const { return band_; }

  std::string ToJson() const;
  // The band is needed for live fallback; it may be null, in which case a
  // miss throws kModelMiss.
  static LookupTable FromJson(std::string_view text,
                              std::shared_ptr<const TreeBand> band);

 private:
  using Slot = std::array<uint32_t, kNumAttributes + 2>;

  std::shared_ptr<const TreeBand> band_;
  Quantization quantization_;
  SlaQuery constraints_;
  SurfaceOptions options_;
  std::map<Slot, Recommendation> table_;
};

}  // namespace xfertune

#endif  // XFERTUNE_LOOKUP_H_
