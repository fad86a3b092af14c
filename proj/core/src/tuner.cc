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

#include "xfertune/tuner.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "xfertune/error.h"

namespace xfertune {

Recommendation BandModel::Query(const AttributeKey& key,
                                const SlaQuery& query) const {
  return FindOptimal(*band_, key, query, options_);
}

Recommendation LookupModel::Query(const AttributeKey& key,
                                  const SlaQuery& query) const {
  return table_->Lookup(key, key.rtt_ms, query.target, query.kind);
}

double CheckIntervalFor(SizeClass size_class) {
  switch (size_class) {
    case SizeClass::kSmall: return 10.0;
    case SizeClass::kMedium: return 20.0;
    case SizeClass::kLarge: return 30.0;
  }
  return 10.0;
}

double EnergyApproximation(double cumulative_energy_j, double elapsed_s,
                           double remaining_bytes,
                           double inst_throughput_mbps) {
  if (!(elapsed_s > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "energy projection needs a positive elapsed time");
  }
  if (remaining_bytes <= 0) return cumulative_energy_j;
  if (cumulative_energy_j == 0) return 0;
  if (!(inst_throughput_mbps > 0)) return kUnboundedEnergy;
  double remaining_s = remaining_bytes * 8.0 / (inst_throughput_mbps * 1e6);
  return cumulative_energy_j / elapsed_s * (elapsed_s + remaining_s);
}

std::string TransferRecord::ToCsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "time,inst_throughput,cumulative_energy,cc,p,pp,cpu_num,cpu_freq\n";
  for (const IntervalSample& s : samples) {
    out << s.time_s << ',' << s.inst_throughput_mbps << ','
        << s.cumulative_energy_j << ',' << s.theta.cc << ',' << s.theta.p
        << ',' << s.theta.pp << ',' << s.theta.cpu_num << ','
        << s.theta.cpu_freq_ghz << '\n';
  }
  return out.str();
}

namespace {

enum class Objective { kThroughput, kEnergy, kNone };

struct LoopSpec {
  Objective objective = Objective::kNone;
  const ParameterModel* model = nullptr;
  AttributeKey key;
  double check_interval_s = 10.0;
  std::optional<TunableParams> fixed;
};

// Returns nullopt when the model has nothing usable for the query.
std::optional<TunableParams> Ask(const ParameterModel& model,
                                 const AttributeKey& key,
                                 const SlaQuery& query) {
  try {
    Recommendation rec = model.Query(key, query);
    if (!query.AdmitsTheta(rec.theta)) return std::nullopt;
    return rec.theta;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoFeasiblePoint ||
        e.code() == ErrorCode::kModelMiss) {
      return std::nullopt;
    }
    throw;
  }
}

TransferRecord RunLoop(TransferSession& session, const TunerConfig& config,
                       LoopSpec spec) {
  if (!(config.sample_period_s > 0) || config.rtt_probe_duration_s < 0 ||
      !(spec.check_interval_s > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "tuner durations must be positive");
  }
  TransferRecord record;
  const double energy_open = session.SampleCumulativeEnergy();

  std::vector<double> rtts;
  for (double t = 0; t < config.rtt_probe_duration_s - 1e-9;
       t += config.sample_period_s) {
    session.Advance(
        std::min(config.sample_period_s, config.rtt_probe_duration_s - t));
    rtts.push_back(session.SampleRtt());
  }
  if (rtts.empty()) rtts.push_back(session.SampleRtt());
  record.probed_rtt_ms =
      std::accumulate(rtts.begin(), rtts.end(), 0.0) / rtts.size();
  spec.key.rtt_ms = record.probed_rtt_ms;

  SlaQuery query = config.sla;
  if (spec.objective == Objective::kThroughput) {
    query.kind = SlaKind::kMaxThroughput;
  } else if (spec.objective == Objective::kEnergy) {
    query.kind = SlaKind::kMinEnergy;
  }

  TunableParams theta = config.fallback_theta;
  if (spec.fixed) {
    theta = *spec.fixed;
  } else if (spec.model != nullptr) {
    auto initial = Ask(*spec.model, spec.key, query);
    record.queries.push_back({session.Clock(), spec.key.rtt_ms, 0,
                              query.target, initial.has_value()});
    if (initial) theta = *initial;
  }

  record.t_start = session.Clock();
  const double energy_start = session.SampleCumulativeEnergy();
  record.probe_energy_j = energy_start - energy_open;
  session.Start(theta);
  record.theta_history.push_back({record.t_start, theta});

  double next_check = record.t_start + spec.check_interval_s;
  std::optional<double> smoothed;
  const bool adaptive = spec.model != nullptr && !spec.fixed;
  while (!session.IsComplete()) {
    double step = config.sample_period_s;
    if (adaptive) step = std::min(step, next_check - session.Clock());
    session.Advance(step);
    double inst = session.SampleInstantaneousThroughput();
    record.samples.push_back({session.Clock(), inst,
                              session.SampleCumulativeEnergy(),
                              session.TransferredBytes(), theta});
    if (session.IsComplete()) break;
    if (!adaptive || session.Clock() < next_check - 1e-9) continue;

    const double rtt = session.SampleRtt();
    smoothed = smoothed && config.ewma_alpha > 0
                   ? config.ewma_alpha * inst +
                         (1 - config.ewma_alpha) * *smoothed
                   : inst;
    double measured = *smoothed;
    double target = query.target;
    if (spec.objective == Objective::kThroughput) {
      target = config.bound_target_by_sla ? std::max(config.sla.target, measured)
                                          : measured;
    } else {
      measured = EnergyApproximation(
          session.SampleCumulativeEnergy() - energy_start, session.Elapsed(),
          session.RemainingBytes(), measured);
      target = config.bound_target_by_sla ? std::min(config.sla.target, measured)
                                          : measured;
    }
    if (!std::isfinite(target) || !(target > 0)) target = config.sla.target;

    SlaQuery next = query;
    next.target = target;
    spec.key.rtt_ms = rtt;
    auto updated = Ask(*spec.model, spec.key, next);
    record.queries.push_back(
        {session.Clock(), rtt, measured, target, updated.has_value()});
    if (updated && !(*updated == theta)) {
      theta = *updated;
      session.UpdateParams(theta);
      record.theta_history.push_back({session.Clock(), theta});
    }
    next_check = session.Clock() + spec.check_interval_s;
  }

  record.t_end = session.CompletionTime();
  record.total_bytes = session.TransferredBytes();
  double duration = record.t_end - record.t_start;
  record.mean_throughput_mbps =
      duration > 0 ? record.total_bytes * 8.0 / 1e6 / duration : 0.0;
  record.total_energy_j = session.SampleCumulativeEnergy() - energy_open;
  return record;
}

LoopSpec MakeSpec(Objective objective, const ParameterModel& model,
                  const DatasetSpec& dataset, const TunerConfig& config) {
  config.sla.Check();
  LoopSpec spec;
  spec.objective = objective;
  spec.model = &model;
  spec.key = AttributeKey{dataset.avg_file_size_kb(),
                          static_cast<double>(dataset.num_files), 0,
                          config.buf_size_mb, config.bandwidth_mbps};
  spec.check_interval_s =
      config.check_interval_s.value_or(CheckIntervalFor(dataset.size_class()));
  return spec;
}

}  // namespace

TransferRecord TuneThroughput(TransferSession& session,
                              const ParameterModel& model,
                              const DatasetSpec& dataset,
                              const TunerConfig& config) {
  return RunLoop(session, config,
                 MakeSpec(Objective::kThroughput, model, dataset, config));
}

TransferRecord TuneEnergy(TransferSession& session,
                          const ParameterModel& model,
                          const DatasetSpec& dataset,
                          const TunerConfig& config) {
  return RunLoop(session, config,
                 MakeSpec(Objective::kEnergy, model, dataset, config));
}

TransferRecord RunFixed(TransferSession& session, const TunableParams& theta,
                        const TunerConfig& config) {
  LoopSpec spec;
  spec.fixed = theta;
  return RunLoop(session, config, spec);
}

}  // namespace xfertune
