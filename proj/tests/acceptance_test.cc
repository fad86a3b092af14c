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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/error.h"
#include "xfertune/harness.h"
#include "xfertune/logstore.h"
#include "xfertune/lookup.h"
#include "xfertune/model_io.h"
#include "xfertune/netsim.h"
#include "xfertune/ranking.h"
#include "xfertune/surface.h"
#include "xfertune/tuner.h"

namespace xfertune {
namespace {

using Clock = std::chrono::steady_clock;
using Groups = std::vector<std::vector<int64_t>>;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::shared_ptr<const LogTable> Table1() {
  static const auto table = std::make_shared<const LogTable>(
      ReadLogFile(std::string(XFERTUNE_TESTDATA_DIR) + "/table1.csv"));
  return table;
}

Groups LeafGroups(const DecisionTree& tree) {
  Groups g;
  for (const TreeNode& n : tree.nodes()) {
    if (!n.is_leaf()) continue;
    auto ids = tree.EntryNos(n);
    std::sort(ids.begin(), ids.end());
    g.push_back(ids);
  }
  std::sort(g.begin(), g.end());
  return g;
}

BuildConfig Forced(std::vector<Attribute> attrs, int cut_number) {
  BuildConfig c;
  c.forced_attributes = std::move(attrs);
  c.cut_number = cut_number;
  return c;
}

Outcome Fig1Reconstruction() {
  auto start = Clock::now();
  auto bw = DecisionTree::Build(Table1(), Forced({Attribute::kBandwidth}, 5));
  auto fs = DecisionTree::Build(
      Table1(), Forced({Attribute::kFileSize, Attribute::kNumFiles}, 4));
  double elapsed = Seconds(start);
  const Groups want = {{1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10}};
  bool a = bw.Height() == 2 && bw.LeafCount() == 5 && LeafGroups(bw) == want;
  int level2_cuts = 0;
  bool cut_is_fs100 = false;
  for (const TreeNode& n : fs.nodes()) {
    if (n.depth == 2 && !n.is_leaf()) {
      ++level2_cuts;
      auto ids = fs.EntryNos(n);
      std::sort(ids.begin(), ids.end());
      cut_is_fs100 = ids == std::vector<int64_t>{1, 2, 6, 7};
    }
  }
  bool b = fs.Height() == 3 && level2_cuts == 1 && cut_is_fs100 &&
           LeafGroups(fs) == want;
  return {a && b && elapsed < 1.0,
          Fmt("bandwidth tree depth %d leaves %zu; file_size tree depth %d, "
              "%d level-2 cut; %.4f s",
              bw.Height(), bw.LeafCount(), fs.Height(), level2_cuts, elapsed)};
}

Outcome DiversityValues() {
  std::vector<size_t> rows(Table1()->size());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  double bw = DiversityIndex(
      AttributeColumn(*Table1(), rows, Attribute::kBandwidth));
  double fs =
      DiversityIndex(AttributeColumn(*Table1(), rows, Attribute::kFileSize));
  auto ranked = RankAttributes(*Table1(), Metric::kDiversityIndex);
  bool ok = std::abs(bw - 1.875) <= 1e-9 &&
            std::abs(fs - 1.2833333333333334) <= 1e-9 &&
            ranked[0].attribute == Attribute::kBandwidth;
  return {ok, Fmt("DI bandwidth %.12f, file_size %.12f, first %s", bw, fs,
                  std::string(AttributeName(ranked[0].attribute)).c_str())};
}

Outcome UnseenKey() {
  auto tree = DecisionTree::Build(
      Table1(), Forced({Attribute::kFileSize, Attribute::kNumFiles}, 4));
  const TreeNode& leaf = tree.Traverse({100, 255, 10, 200, 10});
  auto ids = tree.EntryNos(leaf);
  std::sort(ids.begin(), ids.end());
  bool ok = ids == std::vector<int64_t>{1, 6};
  std::string got;
  for (int64_t id : ids) got += std::to_string(id) + " ";
  return {ok, "key (100,255,10,200,10) -> { " + got + "}"};
}

std::optional<int64_t> ExhaustiveScan(const LogTable& t, const SlaQuery& q) {
  std::optional<size_t> best;
  for (size_t r = 0; r < t.size(); ++r) {
    const TransferLogEntry& e = t[r];
    if (e.theta.cc * e.theta.p > q.n_streams_limit ||
        e.theta.pp > q.pipelining_limit) {
      continue;
    }
    if (q.kind == SlaKind::kMaxThroughput && q.energy_cap &&
        e.energy_j > *q.energy_cap) {
      continue;
    }
    if (q.kind == SlaKind::kMinEnergy && q.throughput_floor &&
        e.throughput_mbps < *q.throughput_floor) {
      continue;
    }
    if (!best) {
      best = r;
      continue;
    }
    const TransferLogEntry& b = t[*best];
    double ev = q.kind == SlaKind::kMaxThroughput ? e.throughput_mbps
                                                  : -e.energy_j;
    double bv = q.kind == SlaKind::kMaxThroughput ? b.throughput_mbps
                                                  : -b.energy_j;
    if (ev > bv || (ev == bv && e.entry_no < b.entry_no)) best = r;
  }
  if (!best) return std::nullopt;
  return t[*best].entry_no;
}

Outcome OracleEquivalence() {
  auto start = Clock::now();
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> small(1, 16);
  std::uniform_int_distribution<int> coarse(1, 60);
  int matches = 0, infeasible = 0;
  const int kTrials = 1000;
  for (int trial = 0; trial < kTrials; ++trial) {
    int n = 1 + static_cast<int>(rng() % 500);
    std::vector<int64_t> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = 1 + i * 3;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<TransferLogEntry> entries;
    for (int i = 0; i < n; ++i) {
      TransferLogEntry e = (*Table1())[0];
      e.entry_no = ids[i];
      e.throughput_mbps = coarse(rng) * 1.25;
      e.energy_j = coarse(rng) * 0.75;
      e.theta = {small(rng), small(rng), small(rng), 1 << (rng() % 4),
                 1.2 + 0.3 * static_cast<double>(rng() % 5)};
      entries.push_back(e);
    }
    LogTable t(entries, "random");
    SlaQuery q;
    q.kind = rng() % 2 ? SlaKind::kMaxThroughput : SlaKind::kMinEnergy;
    q.target = 1 + static_cast<double>(rng() % 100);
    q.n_streams_limit = 1 + static_cast<int>(rng() % 64);
    q.pipelining_limit = 1 + static_cast<int>(rng() % 16);
    if (rng() % 2) q.energy_cap = coarse(rng) * 0.75;
    if (rng() % 2) q.throughput_floor = coarse(rng) * 1.25;
    std::vector<size_t> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = i;
    auto want = ExhaustiveScan(t, q);
    try {
      Recommendation r = EvaluatePoint(t, {0, rows}, q, {100, 250, 10, 200, 1e6});
      if (want && r.source_entry_ids.size() == 1 &&
          r.source_entry_ids[0] == *want) {
        ++matches;
      }
    } catch (const Error& e) {
      if (!want && e.code() == ErrorCode::kNoFeasiblePoint) {
        ++matches;
        ++infeasible;
      }
    }
  }
  double elapsed = Seconds(start);
  return {matches == kTrials && elapsed < 10.0,
          Fmt("%d/%d exact (%d infeasible), %.2f s", matches, kTrials,
              infeasible, elapsed)};
}

SimScenario RandomScenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  SimScenario s;
  s.bandwidth_mbps = 10 + 40000 * u(rng);
  s.rtt_ms = rng() % 8 == 0 ? 0 : 200 * u(rng);
  s.v_read_mbps = 10 + 40000 * u(rng);
  s.v_write_mbps = 10 + 40000 * u(rng);
  s.cpu_capacity_ghz_per_gbps = 0.1 + 3 * u(rng);
  s.stream_rho = 0.01 + 0.98 * u(rng);
  s.load_phi = 0.99 * u(rng);
  s.load_sigma = 0.3 * u(rng);
  s.load_init = 0.95 * u(rng);
  s.noise_sigma = 0;
  return s;
}

TunableParams RandomTheta(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 16);
  std::uniform_real_distribution<double> freq(0.8, 3.5);
  return {small(rng), small(rng), small(rng), small(rng), freq(rng)};
}

Outcome ThroughputCap() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> size(1e3, 1e10);
  int violations = 0;
  const int kSteps = 100000;
  SimScenario s;
  TunableParams theta;
  std::optional<SimState> state;
  double avg = 0;
  for (int i = 0; i < kSteps; ++i) {
    if (i % 100 == 0) {
      s = RandomScenario(rng);
      theta = RandomTheta(rng);
      avg = size(rng);
      state.emplace(rng(), s.load_init, 1e18);
    }
    StepResult r = Step(*state, theta, s, {}, avg, 1.0, true);
    double noiseless = ThroughputModel(theta, s, avg, state->l_ctd);
    if (noiseless > s.Cap() || r.inst_throughput_mbps > s.Cap()) ++violations;
  }
  return {violations == 0,
          Fmt("%d steps, %d violations", kSteps, violations)};
}

Outcome Monotonicity() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  const int kPairs = 1000;
  for (int i = 0; i < kPairs; ++i) {
    SimScenario s = RandomScenario(rng);
    TunableParams t = RandomTheta(rng);
    EnergyModelParams e{20 * u(rng), 0.01 + 5 * u(rng), 0.01 + 5 * u(rng)};
    double avg = 1e3 + 1e9 * u(rng);
    double l = 0.95 * u(rng);

    TunableParams faster = t;
    faster.cpu_freq_ghz += 0.01 + u(rng);
    TunableParams more = t;
    more.cpu_num += 1 + static_cast<int>(rng() % 4);
    if (!(EnergyPower(faster, e) > EnergyPower(t, e))) ++violations;
    if (!(EnergyPower(more, e) > EnergyPower(t, e))) ++violations;

    double th = ThroughputModel(t, s, avg, l);
    TunableParams wider_cc = t, wider_p = t;
    wider_cc.cc += 1;
    wider_p.p += 1;
    if (ThroughputModel(wider_cc, s, avg, l) < th) ++violations;
    if (ThroughputModel(wider_p, s, avg, l) < th) ++violations;
  }
  return {violations == 0, Fmt("%d pairs, %d violations", kPairs, violations)};
}

struct BenchState {
  std::shared_ptr<const LogTable> logs;
  std::shared_ptr<const TreeBand> band;
  std::vector<BenchEpisode> episodes;
  BenchSpec spec;
  double seconds = 0;
};

BenchState& Bench() {
  static BenchState state = [] {
    BenchState s;
    auto start = Clock::now();
    s.logs = std::make_shared<const LogTable>(
        GenerateLogs(DefaultTrainingSpec(2026)));
    s.band = std::make_shared<const TreeBand>(
        TreeBand::Build(s.logs, BuildConfig{}));
    s.spec.scenarios = AllPresets();
    s.spec.datasets = {SmallDataset(), MediumDataset(), LargeDataset()};
    s.spec.episodes_per_scenario = 30;
    s.spec.seed = 2026;
    s.episodes = RunBench(s.spec, s.band);
    s.seconds = Seconds(start);
    return s;
  }();
  return state;
}

Outcome SimulatorBenchmark() {
  BenchState& b = Bench();
  bool ok = b.logs->size() >= 10000 && b.seconds < 300;
  std::string detail = Fmt("%zu logs, %.1f s;", b.logs->size(), b.seconds);
  for (const SimScenario& s : b.spec.scenarios) {
    double tuned = MeanThroughput(b.episodes, kAlgoTreeThroughput, s.name);
    double stat = MeanThroughput(b.episodes, kAlgoStatic, s.name);
    double oracle = MeanThroughput(b.episodes, kAlgoOracle, s.name);
    double e_tuned = MeanEnergy(b.episodes, kAlgoTreeEnergy, s.name);
    double e_max = MeanEnergy(b.episodes, kAlgoStaticMaxFreq, s.name);
    double vs_static = tuned / stat;
    double vs_oracle = tuned / oracle;
    double energy_ratio = e_tuned / e_max;
    ok = ok && vs_static >= 1.5 && vs_oracle >= 0.9 && energy_ratio <= 0.9;
    detail += Fmt(" %s: %.2fx static, %.1f%% oracle, energy %.1f%% of max-freq;",
                  s.name.c_str(), vs_static, 100 * vs_oracle,
                  100 * energy_ratio);
  }
  return {ok, detail};
}

Outcome Convergence() {
  BenchState& b = Bench();
  bool ok = true;
  std::string detail;
  for (const SimScenario& s : b.spec.scenarios) {
    int converged = 0, total = 0;
    for (const BenchEpisode& ep : b.episodes) {
      if (ep.results.front().scenario != s.name) continue;
      ++total;
      if (ConvergedWithin(ep.throughput_record, ep.check_interval_s, 2, 0.9)) {
        ++converged;
      }
    }
    ok = ok && total > 0 && converged >= 0.8 * total;
    detail += Fmt(" %s %d/%d;", s.name.c_str(), converged, total);
  }
  return {ok, "within 2 periods:" + detail};
}

Outcome OfflineTiming() {
  LogGenSpec spec = DefaultTrainingSpec(77);
  spec.repeats = 4;
  LogTable all = GenerateLogs(spec);
  std::vector<size_t> rows(20000);
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = i * all.size() / 20000;
  auto logs = std::make_shared<const LogTable>(all.Select(rows));

  auto start = Clock::now();
  auto band =
      std::make_shared<const TreeBand>(TreeBand::Build(logs, BuildConfig{}));
  double build_s = Seconds(start);

  start = Clock::now();
  LookupTable table = LookupTable::Build(
      band, Quantization::FromTable(*logs, {}), SlaQuery{});
  double lookup_s = Seconds(start);
  return {logs->size() == 20000 && build_s < 10 && lookup_s < 30,
          Fmt("%zu logs: band %.3f s, lookup table %.3f s (%zu entries)",
              logs->size(), build_s, lookup_s, table.size())};
}

Outcome EnergyProjection() {
  double v = EnergyApproximation(50, 10, 300e6, 80);
  return {v == 200.0, Fmt("projected %.17g J", v)};
}

Outcome SerializationRoundTrip() {
  std::shared_ptr<const TreeBand> band = Bench().band;
  TreeBand back = DeserializeBand(SerializeBand(*band));
  const LogTable& t = band->table();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  int agree = 0;
  const int kKeys = 1000;
  for (int i = 0; i < kKeys; ++i) {
    AttributeKey key = KeyOf(t[rng() % t.size()]);
    for (Attribute a : kAllAttributes) key.Set(a, key.Get(a) * u(rng));
    bool same = band->tree_di().Traverse(key).id ==
                    back.tree_di().Traverse(key).id &&
                band->tree_sd().Traverse(key).id ==
                    back.tree_sd().Traverse(key).id &&
                band->MatchRows(key) == back.MatchRows(key);
    agree += same;
  }
  return {agree == kKeys, Fmt("%d/%d keys agree", agree, kKeys)};
}

}  // namespace
}  // namespace xfertune

int main() {
  using xfertune::Outcome;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "fig1-reconstruction", xfertune::Fig1Reconstruction},
      {2, "diversity-index-values", xfertune::DiversityValues},
      {3, "unseen-key-resolution", xfertune::UnseenKey},
      {4, "evaluate-point-oracle", xfertune::OracleEquivalence},
      {5, "throughput-cap", xfertune::ThroughputCap},
      {6, "monotonicity", xfertune::Monotonicity},
      {7, "simulator-benchmark", xfertune::SimulatorBenchmark},
      {8, "convergence", xfertune::Convergence},
      {9, "offline-timing", xfertune::OfflineTiming},
      {10, "energy-approximation", xfertune::EnergyProjection},
      {11, "serialization-round-trip", xfertune::SerializationRoundTrip},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
