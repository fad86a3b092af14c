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

#ifndef XFERTUNE_HARNESS_H_
#define XFERTUNE_HARNESS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/netsim.h"
#include "xfertune/surface.h"
#include "xfertune/tuner.h"

namespace xfertune {

// Training logs over every preset and reference dataset on the training
// grid, two repeats each (10,368 logs).
LogGenSpec DefaultTrainingSpec(uint64_t seed);

struct BenchSpec {
  std::vector<SimScenario> scenarios;
  // Episodes cycle through these.
  std::vector<DatasetSpec> datasets;
  int episodes_per_scenario = 30;
  uint64_t seed = 1;
  EnergyModelParams energy;
  SlaQuery limits;  // stream and pipelining limits for every controller
  TunableParams static_theta{1, 1, 1, 1, 1.2};
  TunableParams max_freq_theta{1, 1, 1, 1, 2.4};
  ThetaGrid oracle_grid = TrainingGrid();
  // Energy tuner throughput floor as a fraction of the oracle throughput.
  double energy_floor_fraction = 0.5;
  // Energy target handed to the min-energy tuner; tiny picks the lowest bin.
  double energy_target_j = 1.0;
  SurfaceOptions surface;
};

inline constexpr const char* kAlgoTreeThroughput = "dtree-throughput";
inline constexpr const char* kAlgoTreeEnergy = "dtree-energy";
inline constexpr const char* kAlgoStatic = "static";
inline constexpr const char* kAlgoStaticMaxFreq = "static-maxfreq";
inline constexpr const char* kAlgoRandom = "random";
inline constexpr const char* kAlgoOracle = "oracle";

struct EpisodeResult {
  std::string algorithm;
  std::string scenario;
  std::string dataset;
  int episode = 0;
  uint64_t seed = 0;
  double mean_throughput_mbps = 0;
  double energy_j = 0;  // transfer energy, probe excluded
  double duration_s = 0;
  size_t adjustments = 0;
  TunableParams final_theta;
};

struct BenchEpisode {
  std::vector<EpisodeResult> results;  // one per algorithm
  TransferRecord throughput_record;    // the max-throughput tuner's trace
  double check_interval_s = 0;
};

// Seed of held-out episode `episode` on scenario `scenario_index`; disjoint
// from the training seeds derived from the same base.
uint64_t EpisodeSeed(uint64_t seed, size_t scenario_index, int episode);

// Runs every controller on one episode. Throws kInvalidArgument when the
// spec has no scenarios or datasets.
BenchEpisode RunEpisode(const BenchSpec& spec,
                        std::shared_ptr<const TreeBand> band,
                        size_t scenario_index, int episode);

std::vector<BenchEpisode> RunBench(const BenchSpec& spec,
                                   std::shared_ptr<const TreeBand> band);

// algorithm,scenario,dataset,episode,seed,mean_throughput_mbps,energy_j,
// duration_s,adjustments,cc,p,pp,cpu_num,cpu_freq_ghz
std::string BenchCsv(const std::vector<BenchEpisode>& episodes);

// Mean of a field over one algorithm's results on one scenario ("" = all).
double MeanThroughput(const std::vector<BenchEpisode>& episodes,
                      const std::string& algorithm,
                      const std::string& scenario = "");
double MeanEnergy(const std::vector<BenchEpisode>& episodes,
                  const std::string& algorithm,
                  const std::string& scenario = "");

// True when some sample in the first `periods` check intervals reaches
// `fraction` of the trace's peak instantaneous throughput.
bool ConvergedWithin(const TransferRecord& record, double check_interval_s,
                     int periods, double fraction);

}  // namespace xfertune

#endif  // XFERTUNE_HARNESS_H_
