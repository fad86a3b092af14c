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

#include "xfertune/surface.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "json.hpp"

#include "xfertune/error.h"

namespace xfertune {

std::string_view SlaKindName(SlaKind kind) {
  return kind == SlaKind::kMaxThroughput ? "max-throughput" : "min-energy";
}

std::optional<SlaKind> SlaKindFromName(std::string_view name) {
  if (name == "max-throughput") return SlaKind::kMaxThroughput;
  if (name == "min-energy") return SlaKind::kMinEnergy;
  return std::nullopt;
}

std::string_view EvalModeName(EvalMode mode) {
  return mode == EvalMode::kDiscrete ? "discrete" : "polynomial";
}

void SlaQuery::Check() const {
  if (!(target > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "SLA target must be positive");
  }
  if (n_streams_limit < 1 || pipelining_limit < 1) {
    throw Error(ErrorCode::kInvalidArgument, "SLA limits must be >= 1");
  }
}

bool SlaQuery::Admits(const TransferLogEntry& entry) const {
  if (!AdmitsTheta(entry.theta)) return false;
  if (kind == SlaKind::kMaxThroughput) {
    return !energy_cap || entry.energy_j <= *energy_cap;
  }
  return !throughput_floor || entry.throughput_mbps >= *throughput_floor;
}

double BinLabel(double value, double bin_width) {
  return std::ceil(value / bin_width) * bin_width;
}

std::vector<SurfaceComponent> DecomposeSurface(const LogTable& table,
                                               std::span<const size_t> rows,
                                               SurfaceMetric metric,
                                               double bin_width) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyLogs, "cannot decompose an empty log group");
  }
  if (!(bin_width > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "bin width must be positive");
  }
  std::map<double, std::vector<size_t>> bins;
  for (size_t row : rows) {
    bins[BinLabel(MetricValue(table[row], metric), bin_width)].push_back(row);
  }
  std::vector<SurfaceComponent> components;
  components.reserve(bins.size());
  for (auto& [label, members] : bins) {
    components.push_back({label, std::move(members)});
  }
  return components;
}

std::vector<SurfaceComponent> DecomposeSurface(const LogTable& table,
                                               SurfaceMetric metric,
                                               double bin_width) {
  std::vector<size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), size_t{0});
  return DecomposeSurface(table, rows, metric, bin_width);
}

size_t FinalSurfaceIndex(std::span<const SurfaceComponent> components,
                         double target, SlaKind kind) {
  if (components.empty()) {
    throw Error(ErrorCode::kEmptyLogs, "no surface components");
  }
  size_t best = 0;
  double best_distance = std::abs(components[0].bin_upper - target);
  for (size_t i = 1; i < components.size(); ++i) {
    double distance = std::abs(components[i].bin_upper - target);
    // Components are sorted ascending, so on a tie the later one is larger.
    if (distance < best_distance ||
        (distance == best_distance && kind == SlaKind::kMaxThroughput)) {
      best = i;
      best_distance = distance;
    }
  }
  return best;
}

const SurfaceComponent& GetFinalSurface(
    std::span<const SurfaceComponent> components, double target,
    SlaKind kind) {
  return components[FinalSurfaceIndex(components, target, kind)];
}

ThetaGrid ThetaGrid::Default() {
  ThetaGrid grid;
  for (int v = 1; v <= 16; ++v) {
    grid.cc.push_back(v);
    grid.p.push_back(v);
    grid.pp.push_back(v);
  }
  grid.cpu_num = {1, 2, 4, 8};
  grid.cpu_freq_ghz = {1.2, 1.5, 1.8, 2.1, 2.4};
  return grid;
}

std::string Recommendation::ToJson() const {
  nlohmann::json j;
  j["theta"] = {{"cc", theta.cc},
                {"p", theta.p},
                {"pp", theta.pp},
                {"cpu_num", theta.cpu_num},
                {"cpu_freq_ghz", theta.cpu_freq_ghz}};
  j["predicted_throughput_mbps"] = predicted_throughput_mbps;
  j["predicted_energy_j"] = predicted_energy_j;
  j["source_entry_ids"] = source_entry_ids;
  j["mode"] = EvalModeName(mode);
  return j.dump();
}

namespace {

std::array<double, 5> Coordinates(const TunableParams& t) {
  return {static_cast<double>(t.cc), static_cast<double>(t.p),
          static_cast<double>(t.pp), static_cast<double>(t.cpu_num),
          t.cpu_freq_ghz};
}

// Higher throughput wins for kMaxThroughput, lower energy for kMinEnergy.
bool Better(const TransferLogEntry& a, const TransferLogEntry& b,
            SlaKind kind) {
  if (kind == SlaKind::kMaxThroughput) {
    if (a.throughput_mbps != b.throughput_mbps) {
      return a.throughput_mbps > b.throughput_mbps;
    }
  } else if (a.energy_j != b.energy_j) {
    return a.energy_j < b.energy_j;
  }
  return a.entry_no < b.entry_no;
}

Recommendation EvaluateDiscrete(const LogTable& table,
                                std::span<const size_t> rows,
                                const SlaQuery& query,
                                const AttributeKey& key) {
  const TransferLogEntry* best = nullptr;
  for (size_t row : rows) {
    const TransferLogEntry& e = table[row];
    if (!query.Admits(e)) continue;
    if (best == nullptr || Better(e, *best, query.kind)) best = &e;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kNoFeasiblePoint,
                "no log in the selected surface satisfies the SLA");
  }
  Recommendation rec;
  rec.theta = best->theta;
  rec.predicted_throughput_mbps =
      std::min(best->throughput_mbps, key.bandwidth_mbps);
  rec.predicted_energy_j = best->energy_j;
  rec.source_entry_ids = {best->entry_no};
  rec.mode = EvalMode::kDiscrete;
  return rec;
}

template <typename T>
std::vector<T> InBox(const std::vector<T>& grid, double lo, double hi,
                     const std::vector<double>& observed) {
  std::vector<T> kept;
  for (T v : grid) {
    if (v >= lo && v <= hi) kept.push_back(v);
  }
  if (kept.empty()) {
    for (double v : observed) kept.push_back(static_cast<T>(v));
  }
  return kept;
}

Recommendation EvaluatePolynomial(const LogTable& table,
                                  std::span<const size_t> rows,
                                  const SlaQuery& query,
                                  const AttributeKey& key,
                                  const SurfaceOptions& options) {
  std::vector<TunableParams> thetas;
  std::vector<double> throughput;
  std::vector<double> energy;
  std::array<std::vector<double>, 5> observed;
  for (size_t row : rows) {
    const TransferLogEntry& e = table[row];
    thetas.push_back(e.theta);
    throughput.push_back(e.throughput_mbps);
    energy.push_back(e.energy_j);
    auto c = Coordinates(e.theta);
    for (int d = 0; d < 5; ++d) observed[d].push_back(c[d]);
  }
  for (auto& values : observed) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
  QuadraticSurface th_fit =
      QuadraticSurface::Fit(thetas, throughput, options.ridge);
  QuadraticSurface e_fit = QuadraticSurface::Fit(thetas, energy, options.ridge);

  ThetaGrid box;
  auto lo = [&](int d) { return observed[d].front(); };
  auto hi = [&](int d) { return observed[d].back(); };
  box.cc = InBox(options.grid.cc, lo(0), hi(0), observed[0]);
  box.p = InBox(options.grid.p, lo(1), hi(1), observed[1]);
  box.pp = InBox(options.grid.pp, lo(2), hi(2), observed[2]);
  box.cpu_num = InBox(options.grid.cpu_num, lo(3), hi(3), observed[3]);
  box.cpu_freq_ghz =
      InBox(options.grid.cpu_freq_ghz, lo(4), hi(4), observed[4]);

  bool found = false;
  Recommendation best;
  double best_objective = 0;
  box.ForEach([&](const TunableParams& theta) {
    if (!query.AdmitsTheta(theta)) return;
    double th = std::max(0.0, th_fit.Predict(theta));
    double en = std::max(0.0, e_fit.Predict(theta));
    double objective;
    if (query.kind == SlaKind::kMaxThroughput) {
      if (query.energy_cap && en > *query.energy_cap) return;
      objective = th;
    } else {
      if (query.throughput_floor && th < *query.throughput_floor) return;
      objective = -en;
    }
    if (!found || objective > best_objective) {
      found = true;
      best_objective = objective;
      best.theta = theta;
      best.predicted_throughput_mbps = std::min(th, key.bandwidth_mbps);
      best.predicted_energy_j = en;
    }
  });
  if (!found) {
    throw Error(ErrorCode::kNoFeasiblePoint,
                "no grid point of the fitted surface satisfies the SLA");
  }
  best.mode = EvalMode::kPolynomial;
  for (size_t row : rows) best.source_entry_ids.push_back(table[row].entry_no);
  return best;
}

}  // namespace

Recommendation EvaluatePoint(const LogTable& table,
                             const SurfaceComponent& component,
                             const SlaQuery& query, const AttributeKey& key,
                             const SurfaceOptions& options) {
  if (component.rows.empty()) {
    throw Error(ErrorCode::kEmptyLogs, "empty surface component");
  }
  if (options.mode == EvalMode::kPolynomial &&
      component.rows.size() >= options.polynomial_min_members) {
    return EvaluatePolynomial(table, component.rows, query, key, options);
  }
  return EvaluateDiscrete(table, component.rows, query, key);
}

Recommendation FindOptimalInGroup(const LogTable& table,
                                  std::span<const size_t> rows,
                                  const AttributeKey& key,
                                  const SlaQuery& query,
                                  const SurfaceOptions& options) {
  query.Check();
  std::vector<size_t> feasible;
  feasible.reserve(rows.size());
  for (size_t row : rows) {
    if (query.Admits(table[row])) feasible.push_back(row);
  }
  if (feasible.empty()) {
    throw Error(ErrorCode::kNoFeasiblePoint,
                "no matched log satisfies the SLA constraints");
  }
  SurfaceMetric metric = MetricFor(query.kind);
  std::vector<SurfaceComponent> components =
      DecomposeSurface(table, feasible, metric, options.BinWidth(metric));
  const SurfaceComponent& chosen =
      GetFinalSurface(components, query.target, query.kind);
  return EvaluatePoint(table, chosen, query, key, options);
}

Recommendation FindOptimal(const TreeBand& band, const AttributeKey& key,
                           const SlaQuery& query,
                           const SurfaceOptions& options) {
  std::vector<size_t> rows = band.MatchRows(key);
  return FindOptimalInGroup(band.table(), rows, key, query, options);
}

QuadraticSurface QuadraticSurface::Fit(std::span<const TunableParams> thetas,
                                       std::span<const double> values,
                                       double ridge) {
  if (thetas.empty() || thetas.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "surface fit needs one value per θ");
  }
  QuadraticSurface surface;
  surface.lo_.assign(5, std::numeric_limits<double>::infinity());
  std::vector<double> hi(5, -std::numeric_limits<double>::infinity());
  for (const TunableParams& t : thetas) {
    auto c = Coordinates(t);
    for (int d = 0; d < 5; ++d) {
      surface.lo_[d] = std::min(surface.lo_[d], c[d]);
      hi[d] = std::max(hi[d], c[d]);
    }
  }
  surface.scale_.resize(5);
  for (int d = 0; d < 5; ++d) {
    double span = hi[d] - surface.lo_[d];
    surface.scale_[d] = span > 0 ? 1.0 / span : 0.0;
  }

  const auto n = static_cast<Eigen::Index>(thetas.size());
  Eigen::MatrixXd x(n, kNumFeatures);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> f = surface.Features(thetas[i]);
    for (int k = 0; k < kNumFeatures; ++k) x(i, k) = f[k];
    y(i) = values[i];
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  // Penalize everything but the intercept, scaled by sample count.
  for (int k = 1; k < kNumFeatures; ++k) {
    gram(k, k) += ridge * static_cast<double>(n);
  }
  Eigen::VectorXd w = gram.ldlt().solve(x.transpose() * y);
  surface.weights_.assign(w.data(), w.data() + w.size());
  return surface;
}

std::vector<double> QuadraticSurface::Features(
    const TunableParams& theta) const {
  auto c = Coordinates(theta);
  double z[5];
  for (int d = 0; d < 5; ++d) z[d] = (c[d] - lo_[d]) * scale_[d];
  std::vector<double> f;
  f.reserve(kNumFeatures);
  f.push_back(1.0);
  for (int d = 0; d < 5; ++d) f.push_back(z[d]);
  for (int a = 0; a < 5; ++a) {
    for (int b = a; b < 5; ++b) f.push_back(z[a] * z[b]);
  }
  return f;
}

double QuadraticSurface::Predict(const TunableParams& theta) const {
  std::vector<double> f = Features(theta);
  double sum = 0;
  for (int k = 0; k < kNumFeatures; ++k) sum += weights_[k] * f[k];
  return sum;
}

}  // namespace xfertune
