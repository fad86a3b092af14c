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

#ifndef XFERTUNE_NETSIM_H_
#define XFERTUNE_NETSIM_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "xfertune/logstore.h"
#include "xfertune/surface.h"
#include "xfertune/tuner.h"

namespace xfertune {

// Network and end-system parameters of a simulated transfer path.
struct SimScenario {
  std::string name = "custom";
  double bandwidth_mbps = 1000;
  double rtt_ms = 40;
  double buf_size_mb = 4.5;
  double v_read_mbps = 2000;
  double v_write_mbps = 2000;
  double noise_sigma = 0.05;  // lognormal σ of per-step throughput noise
  double load_phi = 0.9;      // AR(1) coefficient of contending load
  double load_sigma = 0.05;
  double load_init = 0.0;
  double cpu_capacity_ghz_per_gbps = 1.0;  // γ
  double stream_rho = 0.5;                 // ρ
  // Measured rtt grows by this fraction of itself per unit of load.
  double rtt_load_gain = 0.1;

  // Throws kInvalidArgument when a rate is non-positive or a coefficient is
  // outside its range.
  void Check() const;
  double Cap() const;  // min(b, v_read, v_write)
};

// Testbed presets: chameleon (10 Gbps, 34 ms), cloudlab (1 Gbps, 38 ms),
// intercloud (1 Gbps, 45 ms). Buffers are the path BDPs and disks run at
// twice the link rate.
SimScenario ChameleonPreset();
SimScenario CloudLabPreset();
SimScenario InterCloudPreset();
std::optional<SimScenario> PresetByName(std::string_view name);
std::vector<SimScenario> AllPresets();

struct EnergyModelParams {
  double p_base_w = 10.0;
  double alpha_w_per_core = 2.0;
  double beta_w_per_ghz3 = 1.5;
};

inline constexpr double kMaxLoad = 0.95;
inline constexpr double kNoiseClampSigmas = 4.0;

// Noiseless throughput in Mbps for θ under contending load `l_ctd`.
double ThroughputModel(const TunableParams& theta, const SimScenario& scenario,
                       double avg_file_size_bytes, double l_ctd);

// Transfer-attributable power in W: p_base + cpu_num (alpha + beta f^3).
double EnergyPower(const TunableParams& theta, const EnergyModelParams& params);

struct SimState {
  double clock_s = 0;
  double l_ctd = 0;
  double bytes_remaining = 0;
  double cumulative_energy_j = 0;
  std::mt19937_64 rng;

  SimState(uint64_t seed, double load_init, double bytes)
      : l_ctd(load_init), bytes_remaining(bytes), rng(seed) {}
};

struct StepResult {
  double dt_s = 0;  // time actually simulated; shorter on the final step
  double bytes_moved = 0;
  double joules = 0;
  double inst_throughput_mbps = 0;
};

// Advances the state by dt: evolves the load, draws throughput noise and
// accrues energy. With `transferring` false the path is probed but no bytes
// move. A step that finishes the transfer stops at the last byte. Every step
// consumes the same random draws.
StepResult Step(SimState& state, const TunableParams& theta,
                const SimScenario& scenario, const EnergyModelParams& energy,
                double avg_file_size_bytes, double dt, bool transferring);

// Deterministic seed for cell `index` of a run seeded with `seed`.
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

// TransferSession over the simulator.
class SimSession : public TransferSession {
 public:
  SimSession(SimScenario scenario, DatasetSpec dataset, uint64_t seed,
             EnergyModelParams energy = {}, double dt = 1.0);

  // Forces l_ctd to `value` once the transfer has run `at_elapsed_s`.
  void ScheduleLoadChange(double at_elapsed_s, double value);
  // θ whose power is drawn while probing before Start().
  void SetIdleTheta(const TunableParams& theta) { theta_ = theta; }

  void Start(const TunableParams& theta) override;
  void UpdateParams(const TunableParams& theta) override;
  void Advance(double seconds) override;
  double SampleInstantaneousThroughput() override { return last_throughput_; }
  double SampleRtt() override;
  double SampleCumulativeEnergy() override {
    return state_.cumulative_energy_j;
  }
  double Clock() const override { return state_.clock_s; }
  double Elapsed() const override;
  double RemainingBytes() const override { return state_.bytes_remaining; }
  double TransferredBytes() const override {
    return dataset_.total_size_bytes - state_.bytes_remaining;
  }
  bool IsComplete() const override { return complete_; }
  double CompletionTime() const override { return completion_time_; }

  const SimState& state() const { return state_; }
  const TunableParams& theta() const { return theta_; }

 private:
  SimScenario scenario_;
  DatasetSpec dataset_;
  EnergyModelParams energy_;
  double dt_;
  SimState state_;
  TunableParams theta_{1, 1, 1, 1, 1.2};
  bool started_ = false;
  bool complete_ = false;
  double start_time_ = 0;
  double completion_time_ = 0;
  double last_throughput_ = 0;
  std::vector<std::pair<double, double>> load_changes_;
};

struct SimulatedTransfer {
  double duration_s = 0;
  double mean_throughput_mbps = 0;
  double energy_j = 0;
};

// Whole transfer at constant θ without a probe phase.
SimulatedTransfer SimulateTransfer(const SimScenario& scenario,
                                   const DatasetSpec& dataset,
                                   const TunableParams& theta, uint64_t seed,
                                   const EnergyModelParams& energy = {},
                                   double dt = 1.0);

struct LogGenSpec {
  std::vector<SimScenario> scenarios;
  std::vector<DatasetSpec> datasets;
  ThetaGrid grid;
  int repeats = 1;
  uint64_t seed = 1;
  EnergyModelParams energy;
  double dt = 1.0;
};

// One log per (scenario, dataset, θ, repeat), each from its own derived
// seed, numbered from 1 in that order.
LogTable GenerateLogs(const LogGenSpec& spec);

// The grid used for synthetic training logs: 576 points spanning the
// default search ranges.
ThetaGrid TrainingGrid();

// Baseline run: a constant θ with the tuners' probe and bookkeeping.
TransferRecord RunBaseline(const SimScenario& scenario,
                           const DatasetSpec& dataset,
                           const TunableParams& theta, uint64_t seed,
                           const EnergyModelParams& energy = {},
                           double probe_s = 3.0);

struct OracleResult {
  TunableParams theta;
  double mean_throughput_mbps = 0;
  double energy_j = 0;
};

// Best constant θ in hindsight: every feasible grid point is simulated with
// the same seed and the highest mean throughput wins (lowest grid order on
// ties).
OracleResult ExhaustiveFixedOracle(const SimScenario& scenario,
                                   const DatasetSpec& dataset,
                                   const ThetaGrid& grid,
                                   const SlaQuery& limits, uint64_t seed,
                                   const EnergyModelParams& energy = {});

struct SimConfig {
  SimScenario scenario;
  EnergyModelParams energy;
};

// key = value lines; '#' starts a comment. `preset` selects the base
// scenario, other keys override SimScenario / EnergyModelParams fields.
// Throws kInvalidArgument on unknown keys or bad values.
SimConfig ParseSimConfig(std::string_view text);

}  // namespace xfertune

#endif  // XFERTUNE_NETSIM_H_
