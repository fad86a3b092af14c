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

#include "xfertune/netsim.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "xfertune/error.h"

namespace xfertune {

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

SimScenario MakePreset(std::string name, double bandwidth, double rtt,
                       double buf) {
  SimScenario s;
  s.name = std::move(name);
  s.bandwidth_mbps = bandwidth;
  s.rtt_ms = rtt;
  s.buf_size_mb = buf;
  s.v_read_mbps = 2 * bandwidth;
  s.v_write_mbps = 2 * bandwidth;
  return s;
}

}  // namespace

void SimScenario::Check() const {
  Require(bandwidth_mbps > 0, "bandwidth must be positive");
  Require(v_read_mbps > 0 && v_write_mbps > 0, "disk rates must be positive");
  Require(rtt_ms >= 0, "rtt must be non-negative");
  Require(buf_size_mb > 0, "buffer size must be positive");
  Require(noise_sigma >= 0 && load_sigma >= 0, "sigmas must be non-negative");
  Require(load_phi >= 0 && load_phi < 1, "load_phi must lie in [0, 1)");
  Require(load_init >= 0 && load_init < 1, "load_init must lie in [0, 1)");
  Require(cpu_capacity_ghz_per_gbps > 0, "cpu capacity must be positive");
  Require(stream_rho > 0 && stream_rho < 1, "stream_rho must lie in (0, 1)");
  Require(rtt_load_gain >= 0, "rtt_load_gain must be non-negative");
}

double SimScenario::Cap() const {
  return std::min({bandwidth_mbps, v_read_mbps, v_write_mbps});
}

SimScenario ChameleonPreset() {
  return MakePreset("chameleon", 10000, 34, 40);
}
SimScenario CloudLabPreset() { return MakePreset("cloudlab", 1000, 38, 4.5); }
SimScenario InterCloudPreset() {
  return MakePreset("intercloud", 1000, 45, 4.5);
}

std::optional<SimScenario> PresetByName(std::string_view name) {
  for (SimScenario s : AllPresets()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

std::vector<SimScenario> AllPresets() {
  return {ChameleonPreset(), CloudLabPreset(), InterCloudPreset()};
}

double ThroughputModel(const TunableParams& theta, const SimScenario& scenario,
                       double avg_file_size_bytes, double l_ctd) {
  const double b = scenario.bandwidth_mbps;
  const double avail = b * (1.0 - l_ctd);
  if (!(avail > 0)) return 0.0;
  const double g_s =
      1.0 - std::pow(scenario.stream_rho, theta.cc * theta.p);
  double g_pp = 1.0;
  if (scenario.rtt_ms > 0) {
    // Per-file serialization time in ms at the available rate.
    const double t_f = avg_file_size_bytes * 8.0 / (avail * 1e3);
    g_pp = t_f / (t_f + scenario.rtt_ms / theta.pp);
  }
  // CPU ceiling on the rate the streams can drive.
  const double cpu_cap = theta.cpu_num * theta.cpu_freq_ghz /
                         scenario.cpu_capacity_ghz_per_gbps * 1000.0;
  return std::min({avail * g_s * g_pp, cpu_cap, scenario.Cap()});
}

double EnergyPower(const TunableParams& theta,
                   const EnergyModelParams& params) {
  const double f = theta.cpu_freq_ghz;
  return params.p_base_w +
         theta.cpu_num * (params.alpha_w_per_core +
                          params.beta_w_per_ghz3 * f * f * f);
}

StepResult Step(SimState& state, const TunableParams& theta,
                const SimScenario& scenario, const EnergyModelParams& energy,
                double avg_file_size_bytes, double dt, bool transferring) {
  Require(dt > 0, "step length must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double eps = scenario.load_sigma * normal(state.rng);
  const double z = std::clamp(normal(state.rng), -kNoiseClampSigmas,
                              kNoiseClampSigmas);
  state.l_ctd =
      std::clamp(scenario.load_phi * state.l_ctd + eps, 0.0, kMaxLoad);

  StepResult out;
  out.dt_s = dt;
  if (transferring && state.bytes_remaining > 0) {
    const double noise = std::min(std::exp(scenario.noise_sigma * z),
                                  1.0 + 5.0 * scenario.noise_sigma);
    const double th =
        ThroughputModel(theta, scenario, avg_file_size_bytes, state.l_ctd) *
        noise;
    out.inst_throughput_mbps = th;
    const double possible = th * 1e6 / 8.0 * dt;
    if (possible >= state.bytes_remaining) {
      out.dt_s = dt * state.bytes_remaining / possible;
      out.bytes_moved = state.bytes_remaining;
      state.bytes_remaining = 0;
    } else {
      out.bytes_moved = possible;
      state.bytes_remaining -= possible;
    }
  }
  out.joules = EnergyPower(theta, energy) * out.dt_s;
  state.clock_s += out.dt_s;
  state.cumulative_energy_j += out.joules;
  return out;
}

uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  // splitmix64 finalizer over the combined input.
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SimSession::SimSession(SimScenario scenario, DatasetSpec dataset,
                       uint64_t seed, EnergyModelParams energy, double dt)
    : scenario_(std::move(scenario)),
      dataset_(std::move(dataset)),
      energy_(energy),
      dt_(dt),
      state_(seed, scenario_.load_init, dataset_.total_size_bytes) {
  scenario_.Check();
  Require(dt_ > 0, "step length must be positive");
  Require(dataset_.total_size_bytes >= 0, "dataset size must be >= 0");
}

void SimSession::ScheduleLoadChange(double at_elapsed_s, double value) {
  Require(value >= 0 && value < 1, "load must lie in [0, 1)");
  load_changes_.emplace_back(at_elapsed_s, value);
  std::sort(load_changes_.begin(), load_changes_.end());
}

void SimSession::Start(const TunableParams& theta) {
  if (started_) throw Error(ErrorCode::kSessionFailure, "already started");
  started_ = true;
  theta_ = theta;
  start_time_ = state_.clock_s;
  if (state_.bytes_remaining <= 0) {
    complete_ = true;
    completion_time_ = start_time_;
  }
}

void SimSession::UpdateParams(const TunableParams& theta) {
  if (!started_) throw Error(ErrorCode::kSessionFailure, "not started");
  theta_ = theta;
}

double SimSession::Elapsed() const {
  if (!started_) return 0.0;
  return (complete_ ? completion_time_ : state_.clock_s) - start_time_;
}

double SimSession::SampleRtt() {
  return scenario_.rtt_ms * (1.0 + scenario_.rtt_load_gain * state_.l_ctd);
}

void SimSession::Advance(double seconds) {
  double left = seconds;
  while (left > 1e-12 && !complete_) {
    while (started_ && !load_changes_.empty() &&
           Elapsed() >= load_changes_.front().first - 1e-9) {
      state_.l_ctd = load_changes_.front().second;
      load_changes_.erase(load_changes_.begin());
    }
    const double dt = std::min(dt_, left);
    StepResult r = Step(state_, theta_, scenario_, energy_,
                        dataset_.avg_file_size_bytes, dt, started_);
    left -= r.dt_s;
    if (started_) {
      last_throughput_ = r.inst_throughput_mbps;
      if (state_.bytes_remaining <= 0) {
        complete_ = true;
        completion_time_ = state_.clock_s;
      }
    }
  }
}

SimulatedTransfer SimulateTransfer(const SimScenario& scenario,
                                   const DatasetSpec& dataset,
                                   const TunableParams& theta, uint64_t seed,
                                   const EnergyModelParams& energy,
                                   double dt) {
  Require(dt > 0, "step length must be positive");
  SimState state(seed, scenario.load_init, dataset.total_size_bytes);
  // A path that can never finish would spin forever; give up after a day.
  constexpr double kHorizonS = 86400.0;
  while (state.bytes_remaining > 0) {
    if (state.clock_s > kHorizonS) {
      throw Error(ErrorCode::kSessionFailure,
                  "simulated transfer made no progress");
    }
    Step(state, theta, scenario, energy, dataset.avg_file_size_bytes, dt,
         true);
  }
  SimulatedTransfer out;
  out.duration_s = state.clock_s;
  out.energy_j = state.cumulative_energy_j;
  out.mean_throughput_mbps =
      out.duration_s > 0 ? dataset.total_size_bytes * 8.0 / 1e6 / out.duration_s
                         : 0.0;
  return out;
}

ThetaGrid TrainingGrid() {
  return ThetaGrid{{1, 2, 4, 8}, {1, 2, 4, 8}, {1, 4, 16}, {1, 2, 4, 8},
                   {1.2, 1.8, 2.4}};
}

LogTable GenerateLogs(const LogGenSpec& spec) {
  Require(!spec.scenarios.empty() && !spec.datasets.empty() &&
              spec.grid.size() > 0 && spec.repeats > 0,
          "log generation needs scenarios, datasets, a grid and repeats");
  for (const SimScenario& s : spec.scenarios) s.Check();
  std::vector<TransferLogEntry> entries;
  entries.reserve(spec.scenarios.size() * spec.datasets.size() *
                  spec.grid.size() * spec.repeats);
  uint64_t cell = 0;
  for (const SimScenario& scenario : spec.scenarios) {
    for (const DatasetSpec& dataset : spec.datasets) {
      spec.grid.ForEach([&](const TunableParams& theta) {
        for (int r = 0; r < spec.repeats; ++r) {
          SimulatedTransfer t =
              SimulateTransfer(scenario, dataset, theta,
                               DeriveSeed(spec.seed, cell++), spec.energy,
                               spec.dt);
          TransferLogEntry e;
          e.entry_no = static_cast<int64_t>(entries.size()) + 1;
          e.file_size_kb = dataset.avg_file_size_kb();
          e.num_files = dataset.num_files;
          e.rtt_ms = scenario.rtt_ms;
          e.buf_size_mb = scenario.buf_size_mb;
          e.bandwidth_mbps = scenario.bandwidth_mbps;
          e.throughput_mbps = t.mean_throughput_mbps;
          e.energy_j = t.energy_j;
          e.theta = theta;
          entries.push_back(e);
        }
      });
    }
  }
  std::ostringstream provenance;
  provenance << "netsim seed=" << spec.seed;
  return LogTable(std::move(entries), provenance.str());
}

TransferRecord RunBaseline(const SimScenario& scenario,
                           const DatasetSpec& dataset,
                           const TunableParams& theta, uint64_t seed,
                           const EnergyModelParams& energy, double probe_s) {
  SimSession session(scenario, dataset, seed, energy);
  session.SetIdleTheta(theta);
  TunerConfig config;
  config.rtt_probe_duration_s = probe_s;
  return RunFixed(session, theta, config);
}

OracleResult ExhaustiveFixedOracle(const SimScenario& scenario,
                                   const DatasetSpec& dataset,
                                   const ThetaGrid& grid,
                                   const SlaQuery& limits, uint64_t seed,
                                   const EnergyModelParams& energy) {
  std::optional<OracleResult> best;
  grid.ForEach([&](const TunableParams& theta) {
    if (!limits.AdmitsTheta(theta)) return;
    SimulatedTransfer t = SimulateTransfer(scenario, dataset, theta, seed,
                                           energy);
    if (!best || t.mean_throughput_mbps > best->mean_throughput_mbps) {
      best = OracleResult{theta, t.mean_throughput_mbps, t.energy_j};
    }
  });
  if (!best) {
    throw Error(ErrorCode::kNoFeasiblePoint, "no grid point meets the limits");
  }
  return *best;
}

namespace {

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r";
  size_t a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

double ParseNumber(std::string_view key, std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad value for " + std::string(key) + ": " + std::string(text));
  }
  return v;
}

}  // namespace

SimConfig ParseSimConfig(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    pairs.emplace_back(std::string(Trim(line.substr(0, eq))),
                       std::string(Trim(line.substr(eq + 1))));
  }

  SimConfig config;
  for (const auto& [key, value] : pairs) {
    if (key != "preset") continue;
    auto preset = PresetByName(value);
    if (!preset) {
      throw Error(ErrorCode::kInvalidArgument, "unknown preset: " + value);
    }
    config.scenario = *preset;
  }

  SimScenario& s = config.scenario;
  EnergyModelParams& e = config.energy;
  const std::map<std::string, double*, std::less<>> fields = {
      {"bandwidth_mbps", &s.bandwidth_mbps},
      {"rtt_ms", &s.rtt_ms},
      {"buf_size_mb", &s.buf_size_mb},
      {"v_read_mbps", &s.v_read_mbps},
      {"v_write_mbps", &s.v_write_mbps},
      {"noise_sigma", &s.noise_sigma},
      {"load_phi", &s.load_phi},
      {"load_sigma", &s.load_sigma},
      {"load_init", &s.load_init},
      {"cpu_capacity_ghz_per_gbps", &s.cpu_capacity_ghz_per_gbps},
      {"stream_rho", &s.stream_rho},
      {"rtt_load_gain", &s.rtt_load_gain},
      {"p_base_w", &e.p_base_w},
      {"alpha_w_per_core", &e.alpha_w_per_core},
      {"beta_w_per_ghz3", &e.beta_w_per_ghz3},
  };
  for (const auto& [key, value] : pairs) {
    if (key == "preset") continue;
    if (key == "name") {
      s.name = value;
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + key);
    }
    *it->second = ParseNumber(key, value);
  }
  s.Check();
  Require(e.p_base_w >= 0 && e.alpha_w_per_core >= 0 && e.beta_w_per_ghz3 >= 0,
          "energy model coefficients must be non-negative");
  return config;
}

}  // namespace xfertune
