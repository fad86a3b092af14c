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

#ifndef XFERTUNE_SURFACE_H_
#define XFERTUNE_SURFACE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/logstore.h"

namespace xfertune {

enum class SlaKind { kMaxThroughput, kMinEnergy };

std::string_view SlaKindName(SlaKind kind);
std::optional<SlaKind> SlaKindFromName(std::string_view name);

struct SlaQuery {
  SlaKind kind = SlaKind::kMaxThroughput;
  // T_es in Mbps for kMaxThroughput, E_es in J for kMinEnergy.
  double target = 0;
  std::optional<double> energy_cap;        // E_sla, kMaxThroughput only
  std::optional<double> throughput_floor;  // T_sla, kMinEnergy only
  int n_streams_limit = 32;
  int pipelining_limit = 16;

  // Throws kInvalidArgument on a non-positive target or limit.
  void Check() const;

  bool AdmitsTheta(const TunableParams& theta) const {
    return theta.streams() <= n_streams_limit && theta.pp <= pipelining_limit;
  }
  // Full constraint filter applied to a logged observation.
  bool Admits(const TransferLogEntry& entry) const;
};

enum class SurfaceMetric { kThroughput, kEnergy };

inline SurfaceMetric MetricFor(SlaKind kind) {
  return kind == SlaKind::kMaxThroughput ? SurfaceMetric::kThroughput
                                         : SurfaceMetric::kEnergy;
}

inline double MetricValue(const TransferLogEntry& e, SurfaceMetric metric) {
  return metric == SurfaceMetric::kThroughput ? e.throughput_mbps : e.energy_j;
}

// One bin of a throughput or energy surface. Rows index the table the
// component was decomposed from.
struct SurfaceComponent {
  double bin_upper = 0;
  std::vector<size_t> rows;
};

// Label of the bin holding `value`: ceil(value / width) * width.
double BinLabel(double value, double bin_width);

// Groups rows into bins, sorted by label, empty bins omitted.
// Throws kEmptyLogs / kInvalidArgument.
std::vector<SurfaceComponent> DecomposeSurface(const LogTable& table,
                                               std::span<const size_t> rows,
                                               SurfaceMetric metric,
                                               double bin_width);
std::vector<SurfaceComponent> DecomposeSurface(const LogTable& table,
                                               SurfaceMetric metric,
                                               double bin_width);

// Index of the component whose label is nearest `target`. Equidistant bins
// resolve upward for throughput and downward for energy.
size_t FinalSurfaceIndex(std::span<const SurfaceComponent> components,
                         double target, SlaKind kind);
const SurfaceComponent& GetFinalSurface(
    std::span<const SurfaceComponent> components, double target,
    SlaKind kind);

// Candidate values of θ searched in polynomial mode.
struct ThetaGrid {
  std::vector<int> cc;
  std::vector<int> p;
  std::vector<int> pp;
  std::vector<int> cpu_num;
  std::vector<double> cpu_freq_ghz;

  static ThetaGrid Default();
  size_t size() const {
    return cc.size() * p.size() * pp.size() * cpu_num.size() *
           cpu_freq_ghz.size();
  }
  template <typename F>
  void ForEach(F&& visit) const {
    for (int a : cc)
      for (int b : p)
        for (int c : pp)
          for (int d : cpu_num)
            for (double f : cpu_freq_ghz) visit(TunableParams{a, b, c, d, f});
  }
};

enum class EvalMode { kDiscrete, kPolynomial };

std::string_view EvalModeName(EvalMode mode);

struct SurfaceOptions {
  EvalMode mode = EvalMode::kDiscrete;
  double throughput_bin_width = 100.0;  // Mbps
  double energy_bin_width = 10.0;       // J
  size_t polynomial_min_members = 25;
  double ridge = 1e-3;
  ThetaGrid grid = ThetaGrid::Default();

  double BinWidth(SurfaceMetric metric) const {
    return metric == SurfaceMetric::kThroughput ? throughput_bin_width
                                                : energy_bin_width;
  }
};

struct Recommendation {
  TunableParams theta;
  double predicted_throughput_mbps = 0;
  double predicted_energy_j = 0;
  std::vector<int64_t> source_entry_ids;
  EvalMode mode = EvalMode::kDiscrete;

  // Single-line JSON record.
  std::string ToJson() const;

  friend bool operator==(const Recommendation&,
                         const Recommendation&) = default;
};

// Best point of one component for the query. Discrete mode scans the member
// logs (ties go to the lowest entry_no); polynomial mode, when the component
// is large enough, fits quadratic throughput and energy surfaces over θ and
// searches the grid inside the members' bounding box. Predicted throughput
// never exceeds the key's bandwidth. Throws kNoFeasiblePoint.
Recommendation EvaluatePoint(const LogTable& table,
                             const SurfaceComponent& component,
                             const SlaQuery& query, const AttributeKey& key,
                             const SurfaceOptions& options = {});

// Match -> constraint filter -> decompose -> nearest bin -> evaluate.
Recommendation FindOptimal(const TreeBand& band, const AttributeKey& key,
                           const SlaQuery& query,
                           const SurfaceOptions& options = {});

// Same pipeline over an explicit log group.
Recommendation FindOptimalInGroup(const LogTable& table,
                                  std::span<const size_t> rows,
                                  const AttributeKey& key,
                                  const SlaQuery& query,
                                  const SurfaceOptions& options = {});

// Ridge-regularized quadratic response surface in the five θ coordinates.
// Coordinates are rescaled to the unit box of the fitted data.
class QuadraticSurface {
 public:
  static constexpr int kNumFeatures = 21;

  static QuadraticSurface Fit(std::span<const TunableParams> thetas,
                              std::span<const double> values, double ridge);
  double Predict(const TunableParams& theta) const;

 private:
  std::vector<double> Features(const TunableParams& theta) const;

  std::vector<double> lo_;
  std::vector<double> scale_;
  std::vector<double> weights_;
};

}  // namespace xfertune

#endif  // XFERTUNE_SURFACE_H_
