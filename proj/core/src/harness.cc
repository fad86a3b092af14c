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

#include "xfertune/harness.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "xfertune/error.h"

namespace xfertune {

namespace {

constexpr uint64_t kEpisodeStream = 0x5EED0F5EED0F5EEDULL;

EpisodeResult FromRecord(std::string algorithm, const SimScenario& scenario,
                         const DatasetSpec& dataset, int episode,
                         uint64_t seed, const TransferRecord& rec) {
  EpisodeResult r;
  r.algorithm = std::move(algorithm);
  r.scenario = scenario.name;
  r.dataset = dataset.name;
  r.episode = episode;
  r.seed = seed;
  r.mean_throughput_mbps = rec.mean_throughput_mbps;
  r.energy_j = rec.total_energy_j - rec.probe_energy_j;
  r.duration_s = rec.t_end - rec.t_start;
  r.adjustments = rec.adjustments();
  r.final_theta = rec.theta_history.back().theta;
  return r;
}

TunerConfig BaseConfig(const SimScenario& scenario, const SlaQuery& limits) {
  TunerConfig c;
  c.sla = limits;
  c.bandwidth_mbps = scenario.bandwidth_mbps;
  c.buf_size_mb = scenario.buf_size_mb;
  return c;
}

template <typename Pred>
double MeanOf(const std::vector<BenchEpisode>& episodes,
              const std::string& algorithm, const std::string& scenario,
              Pred field) {
  double sum = 0;
  size_t n = 0;
  for (const BenchEpisode& ep : episodes) {
    for (const EpisodeResult& r : ep.results) {
      if (r.algorithm != algorithm) continue;
      if (!scenario.empty() && r.scenario != scenario) continue;
      sum += field(r);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

LogGenSpec DefaultTrainingSpec(uint64_t seed) {
  LogGenSpec spec;
  spec.scenarios = AllPresets();
  spec.datasets = {SmallDataset(), MediumDataset(), LargeDataset()};
  spec.grid = TrainingGrid();
  spec.repeats = 2;
  spec.seed = seed;
  return spec;
}

uint64_t EpisodeSeed(uint64_t seed, size_t scenario_index, int episode) {
  return DeriveSeed(seed ^ kEpisodeStream,
                    scenario_index * 100000 + static_cast<uint64_t>(episode));
}

BenchEpisode RunEpisode(const BenchSpec& spec,
                        std::shared_ptr<const TreeBand> band,
                        size_t scenario_index, int episode) {
  if (spec.scenarios.empty() || spec.datasets.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "benchmark needs scenarios and datasets");
  }
  const SimScenario& scenario = spec.scenarios.at(scenario_index);
  const DatasetSpec& dataset =
      spec.datasets[static_cast<size_t>(episode) % spec.datasets.size()];
  const uint64_t seed = EpisodeSeed(spec.seed, scenario_index, episode);

  BenchEpisode out;
  out.check_interval_s = CheckIntervalFor(dataset.size_class());

  OracleResult oracle = ExhaustiveFixedOracle(
      scenario, dataset, spec.oracle_grid, spec.limits, seed, spec.energy);
  {
    EpisodeResult r;
    r.algorithm = kAlgoOracle;
    r.scenario = scenario.name;
    r.dataset = dataset.name;
    r.episode = episode;
    r.seed = seed;
    r.mean_throughput_mbps = oracle.mean_throughput_mbps;
    r.energy_j = oracle.energy_j;
    r.duration_s = oracle.mean_throughput_mbps > 0
                       ? dataset.total_size_bytes * 8 / 1e6 /
                             oracle.mean_throughput_mbps
                       : 0;
    r.final_theta = oracle.theta;
    out.results.push_back(r);
  }

  BandModel model(std::move(band), spec.surface);

  {
    SimSession session(scenario, dataset, seed, spec.energy);
    TunerConfig config = BaseConfig(scenario, spec.limits);
    config.sla.kind = SlaKind::kMaxThroughput;
    config.sla.target = scenario.bandwidth_mbps;
    config.sla.throughput_floor.reset();
    out.throughput_record = TuneThroughput(session, model, dataset, config);
    out.results.push_back(FromRecord(kAlgoTreeThroughput, scenario, dataset,
                                     episode, seed, out.throughput_record));
  }
  {
    SimSession session(scenario, dataset, seed, spec.energy);
    TunerConfig config = BaseConfig(scenario, spec.limits);
    config.sla.kind = SlaKind::kMinEnergy;
    config.sla.target = spec.energy_target_j;
    config.sla.energy_cap.reset();
    config.sla.throughput_floor =
        spec.energy_floor_fraction * oracle.mean_throughput_mbps;
    TransferRecord rec = TuneEnergy(session, model, dataset, config);
    out.results.push_back(
        FromRecord(kAlgoTreeEnergy, scenario, dataset, episode, seed, rec));
  }
  out.results.push_back(FromRecord(
      kAlgoStatic, scenario, dataset, episode, seed,
      RunBaseline(scenario, dataset, spec.static_theta, seed, spec.energy)));
  out.results.push_back(FromRecord(
      kAlgoStaticMaxFreq, scenario, dataset, episode, seed,
      RunBaseline(scenario, dataset, spec.max_freq_theta, seed, spec.energy)));

  std::vector<TunableParams> admitted;
  spec.oracle_grid.ForEach([&](const TunableParams& t) {
    if (spec.limits.AdmitsTheta(t)) admitted.push_back(t);
  });
  std::mt19937_64 rng(seed);
  TunableParams random_theta = admitted.at(rng() % admitted.size());
  out.results.push_back(FromRecord(
      kAlgoRandom, scenario, dataset, episode, seed,
      RunBaseline(scenario, dataset, random_theta, seed, spec.energy)));
  return out;
}

std::vector<BenchEpisode> RunBench(const BenchSpec& spec,
                                   std::shared_ptr<const TreeBand> band) {
  std::vector<BenchEpisode> out;
  for (size_t s = 0; s < spec.scenarios.size(); ++s) {
    for (int e = 0; e < spec.episodes_per_scenario; ++e) {
      out.push_back(RunEpisode(spec, band, s, e));
    }
  }
  return out;
}

std::string BenchCsv(const std::vector<BenchEpisode>& episodes) {
  std::ostringstream out;
  out.precision(10);
  out << "algorithm,scenario,dataset,episode,seed,mean_throughput_mbps,"
         "energy_j,duration_s,adjustments,cc,p,pp,cpu_num,cpu_freq_ghz\n";
  for (const BenchEpisode& ep : episodes) {
    for (const EpisodeResult& r : ep.results) {
      out << r.algorithm << ',' << r.scenario << ',' << r.dataset << ','
          << r.episode << ',' << r.seed << ',' << r.mean_throughput_mbps << ','
          << r.energy_j << ',' << r.duration_s << ',' << r.adjustments << ','
          << r.final_theta.cc << ',' << r.final_theta.p << ','
          << r.final_theta.pp << ',' << r.final_theta.cpu_num << ','
          << r.final_theta.cpu_freq_ghz << '\n';
    }
  }
  return out.str();
}

double MeanThroughput(const std::vector<BenchEpisode>& episodes,
                      const std::string& algorithm,
                      const std::string& scenario) {
  return MeanOf(episodes, algorithm, scenario,
                [](const EpisodeResult& r) { return r.mean_throughput_mbps; });
}

double MeanEnergy(const std::vector<BenchEpisode>& episodes,
                  const std::string& algorithm, const std::string& scenario) {
  return MeanOf(episodes, algorithm, scenario,
                [](const EpisodeResult& r) { return r.energy_j; });
}

bool ConvergedWithin(const TransferRecord& record, double check_interval_s,
                     int periods, double fraction) {
  if (record.samples.empty()) return true;
  double peak = 0;
  for (const IntervalSample& s : record.samples) {
    peak = std::max(peak, s.inst_throughput_mbps);
  }
  const double deadline = record.t_start + periods * check_interval_s + 1e-9;
  for (const IntervalSample& s : record.samples) {
    if (s.time_s > deadline) break;
    if (s.inst_throughput_mbps >= fraction * peak) return true;
  }
  return false;
}

}  // namespace xfertune
