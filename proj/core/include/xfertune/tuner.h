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

#ifndef XFERTUNE_TUNER_H_
#define XFERTUNE_TUNER_H_

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/logstore.h"
#include "xfertune/lookup.h"
#include "xfertune/surface.h"

namespace xfertune {

// What a tuner needs from a running transfer. Time is session time and only
// moves forward through Advance(), so runs are reproducible.
class TransferSession {
 public:
  virtual ~TransferSession() = default;

  virtual void Start(const TunableParams& theta) = 0;
  virtual void UpdateParams(const TunableParams& theta) = 0;
  // Lets `seconds` of session time pass (stops early at completion).
  virtual void Advance(double seconds) = 0;

  virtual double SampleInstantaneousThroughput() = 0;  // Mbps
  virtual double SampleRtt() = 0;                      // ms
  virtual double SampleCumulativeEnergy() = 0;         // J, non-decreasing
  virtual double Clock() const = 0;                    // s since session open
  virtual double Elapsed() const = 0;                  // s since Start()
  virtual double RemainingBytes() const = 0;           // non-increasing
  virtual double TransferredBytes() const = 0;
  virtual bool IsComplete() const = 0;
  // Session time at which the last byte arrived, once complete.
  virtual double CompletionTime() const = 0;
};

// Source of θ recommendations for the online loop.
class ParameterModel {
 public:
  virtual ~ParameterModel() = default;
  // `key` already carries the measured rtt. Throws kNoFeasiblePoint or
  // kModelMiss when no recommendation exists.
  virtual Recommendation Query(const AttributeKey& key,
                               const SlaQuery& query) const = 0;
};

class BandModel : public ParameterModel {
 public:
  BandModel(std::shared_ptr<const TreeBand> band, SurfaceOptions options = {})
      : band_(std::move(band)), options_(std::move(options)) {}
  Recommendation Query(const AttributeKey& key,
                       const SlaQuery& query) const override;

 private:
  std::shared_ptr<const TreeBand> band_;
  SurfaceOptions options_;
};

// Answers from a precomputed table; constraints come from the table's
// template and only the query's kind and target are used.
class LookupModel : public ParameterModel {
 public:
  explicit LookupModel(std::shared_ptr<const LookupTable> table)
      : table_(std::move(table)) {}
  Recommendation Query(const AttributeKey& key,
                       const SlaQuery& query) const override;

 private:
  std::shared_ptr<const LookupTable> table_;
};

// Check period by dataset class: 10 s small, 20 s medium, 30 s large.
double CheckIntervalFor(SizeClass size_class);

struct TunerConfig {
  double rtt_probe_duration_s = 3.0;
  // Derived from the dataset's size class when unset.
  std::optional<double> check_interval_s;
  double sample_period_s = 1.0;
  SlaQuery sla;
  // Link properties that complete the search key.
  double bandwidth_mbps = 0;
  double buf_size_mb = 0;
  // Used until the model produces a first recommendation.
  TunableParams fallback_theta{1, 1, 1, 1, 1.2};
  // Smoothing of the throughput sample fed to the model; 0 disables it.
  double ewma_alpha = 0;
  // Keep the pursued target at least as ambitious as the SLA: throughput
  // targets never drop below sla.target, energy targets never exceed it.
  bool bound_target_by_sla = true;
};

struct ThetaChange {
  double time_s;
  TunableParams theta;
};

struct IntervalSample {
  double time_s;
  double inst_throughput_mbps;
  double cumulative_energy_j;
  double transferred_bytes;
  TunableParams theta;
};

struct ModelQuery {
  double time_s;
  double rtt_ms;
  double measured;  // throughput (Mbps) or projected energy (J)
  double target;    // value handed to the model
  bool hit;         // false when the model had no answer
};

struct TransferRecord {
  double t_start = 0;
  double t_end = 0;
  std::vector<ThetaChange> theta_history;
  std::vector<IntervalSample> samples;
  std::vector<ModelQuery> queries;
  double total_bytes = 0;
  double mean_throughput_mbps = 0;
  double total_energy_j = 0;  // meter reading at completion, probe included
  double probe_energy_j = 0;
  double probed_rtt_ms = 0;

  size_t adjustments() const {
    return theta_history.empty() ? 0 : theta_history.size() - 1;
  }
  // time,inst_throughput,cumulative_energy,cc,p,pp,cpu_num,cpu_freq
  std::string ToCsv() const;
};

inline constexpr double kUnboundedEnergy =
    std::numeric_limits<double>::infinity();

// Mean power so far times projected total duration. Returns
// kUnboundedEnergy when bytes remain but throughput is zero.
double EnergyApproximation(double cumulative_energy_j, double elapsed_s,
                           double remaining_bytes, double inst_throughput_mbps);

// Online maximum-throughput loop: probe rtt, take an initial θ, then
// re-query every check interval with the measured rtt and throughput.
TransferRecord TuneThroughput(TransferSession& session,
                              const ParameterModel& model,
                              const DatasetSpec& dataset,
                              const TunerConfig& config);

// Online minimum-energy loop: like TuneThroughput but each check projects
// the total energy and queries the min-energy surface with it.
TransferRecord TuneEnergy(TransferSession& session,
                          const ParameterModel& model,
                          const DatasetSpec& dataset,
                          const TunerConfig& config);

// Constant-θ run with the same probe and bookkeeping as the tuners.
TransferRecord RunFixed(TransferSession& session, const TunableParams& theta,
                        const TunerConfig& config);

}  // namespace xfertune

#endif  // XFERTUNE_TUNER_H_
