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

// xfertune command-line tool: log generation, model building, queries,
// simulated tuning runs, benchmarks and export.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xfertune/dtree.h"
#include "xfertune/error.h"
#include "xfertune/harness.h"
#include "xfertune/logstore.h"
#include "xfertune/lookup.h"
#include "xfertune/model_io.h"
#include "xfertune/netsim.h"
#include "xfertune/surface.h"
#include "xfertune/tuner.h"

namespace xfertune {
namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown for bad argument values that CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  uint64_t seed = 1;
  std::string config;
  std::string out;
  bool json = false;
};

void Emit(const GlobalFlags& g, const std::string& fallback_path,
          const std::string& contents) {
  const std::string& path = g.out.empty() ? fallback_path : g.out;
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    WriteTextFile(path, contents);
  }
}

std::optional<SimConfig> LoadConfig(const GlobalFlags& g) {
  if (g.config.empty()) return std::nullopt;
  return ParseSimConfig(ReadTextFile(g.config));
}

std::vector<SimScenario> ResolvePresets(const std::vector<std::string>& names,
                                        const std::optional<SimConfig>& cfg) {
  if (cfg && names.empty()) return {cfg->scenario};
  if (names.empty()) return AllPresets();
  std::vector<SimScenario> out;
  for (const std::string& n : names) {
    auto p = PresetByName(n);
    if (!p) throw UsageError("unknown preset: " + n);
    if (cfg) {
      // Config overrides apply on top of every named preset.
      SimScenario s = cfg->scenario;
      s.name = p->name;
      s.bandwidth_mbps = p->bandwidth_mbps;
      s.rtt_ms = p->rtt_ms;
      s.buf_size_mb = p->buf_size_mb;
      s.v_read_mbps = p->v_read_mbps;
      s.v_write_mbps = p->v_write_mbps;
      out.push_back(s);
    } else {
      out.push_back(*p);
    }
  }
  return out;
}

std::vector<DatasetSpec> ResolveDatasets(const std::vector<std::string>& names) {
  if (names.empty()) return {SmallDataset(), MediumDataset(), LargeDataset()};
  std::vector<DatasetSpec> out;
  for (const std::string& n : names) {
    auto d = DatasetByName(n);
    if (!d) throw UsageError("unknown dataset: " + n);
    out.push_back(*d);
  }
  return out;
}

Metric ParseMetric(const std::string& s) {
  if (s == "di") return Metric::kDiversityIndex;
  if (s == "sd") return Metric::kStdDev;
  if (s == "var") return Metric::kVariance;
  throw UsageError("unknown metric: " + s);
}

AttributeKey ParseKey(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw UsageError("bad key field: " + field);
    }
  }
  if (v.size() != 5) {
    throw UsageError(
        "--key needs file_size_kb,num_files,rtt_ms,buf_size_mb,bandwidth_mbps");
  }
  AttributeKey key{v[0], v[1], v[2], v[3], v[4]};
  if (!key.AllPositive()) throw UsageError("key fields must be positive");
  return key;
}

struct SlaArg {
  SlaKind kind;
  std::optional<double> target;
};

SlaArg ParseSla(const std::string& text) {
  size_t colon = text.find(':');
  auto kind = SlaKindFromName(text.substr(0, colon));
  if (!kind) throw UsageError("unknown SLA kind: " + text);
  SlaArg out{*kind, std::nullopt};
  if (colon != std::string::npos) {
    try {
      out.target = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("bad SLA target: " + text);
    }
  }
  return out;
}

// Loads a band, or a single tree doubled into a band.
std::shared_ptr<const TreeBand> LoadBand(const std::string& path) {
  std::string text = ReadTextFile(path);
  if (ModelKind(text) == "band") {
    return std::make_shared<const TreeBand>(DeserializeBand(text));
  }
  DecisionTree tree = DeserializeTree(text);
  return std::make_shared<const TreeBand>(tree, tree);
}

struct QueryArgs {
  std::string model;
  std::string lookup;
  std::string key;
  std::string sla = "max-throughput";
  std::optional<double> energy_cap;
  std::optional<double> throughput_floor;
  int streams_limit = 32;
  int pipelining_limit = 16;
  std::string mode = "discrete";
};

SurfaceOptions OptionsFor(const std::string& mode) {
  SurfaceOptions o;
  if (mode == "discrete") {
    o.mode = EvalMode::kDiscrete;
  } else if (mode == "polynomial") {
    o.mode = EvalMode::kPolynomial;
  } else {
    throw UsageError("unknown mode: " + mode);
  }
  return o;
}

SlaQuery BuildQuery(const SlaArg& sla, const AttributeKey& key,
                    const QueryArgs& a, const SurfaceOptions& options) {
  SlaQuery q;
  q.kind = sla.kind;
  // Maximum-achievable throughput means the link rate; the lowest energy bin
  // is reached by the smallest positive target.
  q.target = sla.target.value_or(sla.kind == SlaKind::kMaxThroughput
                                     ? key.bandwidth_mbps
                                     : options.energy_bin_width);
  q.energy_cap = a.energy_cap;
  q.throughput_floor = a.throughput_floor;
  q.n_streams_limit = a.streams_limit;
  q.pipelining_limit = a.pipelining_limit;
  try {
    q.Check();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return q;
}

int RunQuery(const QueryArgs& a, const GlobalFlags& g) {
  AttributeKey key = ParseKey(a.key);
  SlaArg sla = ParseSla(a.sla);
  SurfaceOptions options = OptionsFor(a.mode);
  SlaQuery q = BuildQuery(sla, key, a, options);
  auto band = LoadBand(a.model);
  Recommendation rec;
  if (!a.lookup.empty()) {
    LookupTable table = LookupTable::FromJson(ReadTextFile(a.lookup), band);
    rec = table.Lookup(key, key.rtt_ms, q.target, q.kind);
  } else {
    rec = FindOptimal(*band, key, q, options);
  }
  Emit(g, "", rec.ToJson() + "\n");
  return 0;
}

struct GenArgs {
  std::vector<std::string> presets;
  std::vector<std::string> datasets;
  int repeats = 2;
  std::string grid = "training";
};

int RunGenLogs(const GenArgs& a, const GlobalFlags& g) {
  auto cfg = LoadConfig(g);
  LogGenSpec spec;
  spec.scenarios = ResolvePresets(a.presets, cfg);
  spec.datasets = ResolveDatasets(a.datasets);
  if (a.grid == "training") {
    spec.grid = TrainingGrid();
  } else if (a.grid == "default") {
    spec.grid = ThetaGrid::Default();
  } else {
    throw UsageError("unknown grid: " + a.grid);
  }
  if (a.repeats < 1) throw UsageError("--repeats must be >= 1");
  spec.repeats = a.repeats;
  spec.seed = g.seed;
  if (cfg) spec.energy = cfg->energy;
  Emit(g, "", WriteLogs(GenerateLogs(spec)));
  return 0;
}

struct BuildArgs {
  std::string logs;
  int leaf_threshold = 2;
  int cut_number = 4;
  std::string metric = "band";
  std::vector<std::string> forced;
  std::string lookup_out;
};

int RunBuild(const BuildArgs& a, const GlobalFlags& g) {
  auto table = std::make_shared<const LogTable>(ReadLogFile(a.logs));
  BuildConfig config;
  config.leaf_threshold = a.leaf_threshold;
  config.cut_number = a.cut_number;
  for (const std::string& name : a.forced) {
    auto attr = AttributeFromName(name);
    if (!attr) throw UsageError("unknown attribute: " + name);
    config.forced_attributes.push_back(*attr);
  }
  try {
    config.Check();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::string text;
  std::shared_ptr<const TreeBand> band;
  if (a.metric == "band") {
    band = std::make_shared<const TreeBand>(TreeBand::Build(table, config));
    text = SerializeBand(*band);
  } else {
    config.metric = ParseMetric(a.metric);
    DecisionTree tree = DecisionTree::Build(table, config);
    text = SerializeTree(tree);
    band = std::make_shared<const TreeBand>(tree, tree);
  }
  Emit(g, "model.json", text);
  if (!a.lookup_out.empty()) {
    LookupTable lookup =
        LookupTable::Build(band, Quantization::FromTable(*table, {}), {});
    WriteTextFile(a.lookup_out, lookup.ToJson());
  }
  return 0;
}

struct TuneArgs {
  std::string model;
  std::string preset = "cloudlab";
  std::string dataset = "small";
  std::string sla = "max-throughput";
  std::optional<double> throughput_floor;
  std::optional<double> energy_cap;
  double ewma_alpha = 0;
  std::optional<double> load_step_at;
  double load_step_value = 0.5;
  std::string fixed;
};

TunableParams ParseTheta(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      v.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw UsageError("bad θ field: " + field);
    }
  }
  if (v.size() != 5) throw UsageError("θ needs cc,p,pp,cpu_num,cpu_freq_ghz");
  return {static_cast<int>(v[0]), static_cast<int>(v[1]),
          static_cast<int>(v[2]), static_cast<int>(v[3]), v[4]};
}

int RunTune(const TuneArgs& a, const GlobalFlags& g) {
  auto cfg = LoadConfig(g);
  SimScenario scenario = ResolvePresets({a.preset}, cfg).front();
  DatasetSpec dataset = ResolveDatasets({a.dataset}).front();
  EnergyModelParams energy = cfg ? cfg->energy : EnergyModelParams{};
  SimSession session(scenario, dataset, g.seed, energy);
  if (a.load_step_at) session.ScheduleLoadChange(*a.load_step_at,
                                                 a.load_step_value);
  SlaArg sla = ParseSla(a.sla);
  TunerConfig config;
  config.bandwidth_mbps = scenario.bandwidth_mbps;
  config.buf_size_mb = scenario.buf_size_mb;
  config.ewma_alpha = a.ewma_alpha;
  config.sla.kind = sla.kind;
  config.sla.target = sla.target.value_or(
      sla.kind == SlaKind::kMaxThroughput ? scenario.bandwidth_mbps : 1.0);
  config.sla.throughput_floor = a.throughput_floor;
  config.sla.energy_cap = a.energy_cap;
  TransferRecord rec;
  if (!a.fixed.empty()) {
    session.SetIdleTheta(ParseTheta(a.fixed));
    rec = RunFixed(session, ParseTheta(a.fixed), config);
  } else {
    if (a.model.empty()) throw UsageError("--model or --fixed is required");
    BandModel model(LoadBand(a.model));
    rec = sla.kind == SlaKind::kMaxThroughput
              ? TuneThroughput(session, model, dataset, config)
              : TuneEnergy(session, model, dataset, config);
  }
  Emit(g, "", rec.ToCsv());
  nlohmann::json summary = {
      {"scenario", scenario.name},
      {"dataset", dataset.name},
      {"t_start", rec.t_start},
      {"t_end", rec.t_end},
      {"mean_throughput_mbps", rec.mean_throughput_mbps},
      {"total_energy_j", rec.total_energy_j},
      {"probe_energy_j", rec.probe_energy_j},
      {"adjustments", rec.adjustments()},
  };
  if (!g.out.empty()) std::cout << summary.dump() << "\n";
  return 0;
}

struct BenchArgs {
  std::string model;
  std::vector<std::string> presets;
  std::vector<std::string> datasets;
  int episodes = 30;
};

int RunBenchCommand(const BenchArgs& a, const GlobalFlags& g) {
  auto cfg = LoadConfig(g);
  BenchSpec spec;
  spec.scenarios = ResolvePresets(a.presets, cfg);
  spec.datasets = ResolveDatasets(a.datasets);
  if (a.episodes < 1) throw UsageError("--episodes must be >= 1");
  spec.episodes_per_scenario = a.episodes;
  spec.seed = g.seed;
  if (cfg) spec.energy = cfg->energy;
  std::shared_ptr<const TreeBand> band;
  if (a.model.empty()) {
    LogGenSpec gen = DefaultTrainingSpec(g.seed);
    gen.scenarios = spec.scenarios;
    gen.energy = spec.energy;
    auto logs = std::make_shared<const LogTable>(GenerateLogs(gen));
    band = std::make_shared<const TreeBand>(TreeBand::Build(logs, {}));
  } else {
    band = LoadBand(a.model);
  }
  auto episodes = RunBench(spec, band);
  Emit(g, "", BenchCsv(episodes));
  if (!g.out.empty()) {
    for (const SimScenario& s : spec.scenarios) {
      std::cout << s.name << ": dtree " << MeanThroughput(episodes,
                                                         kAlgoTreeThroughput,
                                                         s.name)
                << " Mbps, static "
                << MeanThroughput(episodes, kAlgoStatic, s.name)
                << " Mbps, oracle "
                << MeanThroughput(episodes, kAlgoOracle, s.name) << " Mbps\n";
    }
  }
  return 0;
}

struct ExportArgs {
  std::string model;
  std::string format = "dot";
  std::string tree = "di";
};

int RunExport(const ExportArgs& a, const GlobalFlags& g) {
  auto band = LoadBand(a.model);
  const DecisionTree* tree = nullptr;
  if (a.tree == "di") {
    tree = &band->tree_di();
  } else if (a.tree == "sd") {
    tree = &band->tree_sd();
  } else {
    throw UsageError("--tree must be di or sd");
  }
  if (a.format == "dot") {
    Emit(g, "", tree->ToDot(a.tree));
  } else if (a.format == "csv") {
    Emit(g, "", WriteLogs(band->table()));
  } else {
    throw UsageError("--format must be dot or csv");
  }
  return 0;
}

void Diagnose(const GlobalFlags& g, const std::string& kind,
              const std::string& message) {
  if (g.json) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump()
              << "\n";
  } else {
    std::cerr << "xfertune: " << message << "\n";
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Learn and apply data-transfer parameter settings"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config, "Simulator key=value config file");
  app.add_option("--out", g.out, "Output path ('-' for stdout)");
  app.add_flag("--json", g.json, "Single-line JSON diagnostics on stderr");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-logs", "Generate synthetic logs");
  gen_cmd->add_option("--preset", gen.presets, "chameleon|cloudlab|intercloud");
  gen_cmd->add_option("--dataset", gen.datasets, "small|medium|large");
  gen_cmd->add_option("--repeats", gen.repeats)->capture_default_str();
  gen_cmd->add_option("--grid", gen.grid, "training|default")
      ->capture_default_str();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build a tree or band model");
  build_cmd->add_option("--logs", build.logs, "Log CSV")->required();
  build_cmd->add_option("--leaf-threshold", build.leaf_threshold)
      ->capture_default_str();
  build_cmd->add_option("--cut-number", build.cut_number)
      ->capture_default_str();
  build_cmd->add_option("--metric", build.metric, "band|di|sd|var")
      ->capture_default_str();
  build_cmd->add_option("--force", build.forced,
                        "Attribute to cut on per level, root first");
  build_cmd->add_option("--lookup-out", build.lookup_out,
                        "Also precompute a lookup table to this path");

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Recommend θ for a key");
  query_cmd->add_option("--model", query.model)->required();
  query_cmd->add_option("--lookup", query.lookup, "Precomputed lookup table");
  query_cmd->add_option("--key", query.key, "f_kb,n,rtt_ms,buf_mb,bw_mbps")
      ->required();
  query_cmd->add_option("--sla", query.sla, "kind[:target]")
      ->capture_default_str();
  query_cmd->add_option("--energy-cap", query.energy_cap);
  query_cmd->add_option("--throughput-floor", query.throughput_floor);
  query_cmd->add_option("--streams-limit", query.streams_limit)
      ->capture_default_str();
  query_cmd->add_option("--pipelining-limit", query.pipelining_limit)
      ->capture_default_str();
  query_cmd->add_option("--mode", query.mode, "discrete|polynomial")
      ->capture_default_str();

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Run a simulated tuned transfer");
  tune_cmd->add_option("--model", tune.model);
  tune_cmd->add_option("--fixed", tune.fixed, "Constant θ cc,p,pp,cpu,freq");
  tune_cmd->add_option("--preset", tune.preset)->capture_default_str();
  tune_cmd->add_option("--dataset", tune.dataset)->capture_default_str();
  tune_cmd->add_option("--sla", tune.sla, "kind[:target]")
      ->capture_default_str();
  tune_cmd->add_option("--throughput-floor", tune.throughput_floor);
  tune_cmd->add_option("--energy-cap", tune.energy_cap);
  tune_cmd->add_option("--ewma-alpha", tune.ewma_alpha)->capture_default_str();
  tune_cmd->add_option("--load-step-at", tune.load_step_at,
                       "Transfer time of a forced load change");
  tune_cmd->add_option("--load-step-value", tune.load_step_value)
      ->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare controllers");
  bench_cmd->add_option("--model", bench.model,
                        "Band to use; trained from fresh logs when omitted");
  bench_cmd->add_option("--preset", bench.presets);
  bench_cmd->add_option("--dataset", bench.datasets);
  bench_cmd->add_option("--episodes", bench.episodes, "Episodes per preset")
      ->capture_default_str();

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Export a model");
  export_cmd->add_option("--model", exp.model)->required();
  export_cmd->add_option("--format", exp.format, "dot|csv")
      ->capture_default_str();
  export_cmd->add_option("--tree", exp.tree, "di|sd")->capture_default_str();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    Diagnose(g, "usage", e.what());
    CLI::App* context = &app;
    for (CLI::App* sub : app.get_subcommands()) context = sub;
    std::cerr << context->help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return RunGenLogs(gen, g);
    if (build_cmd->parsed()) return RunBuild(build, g);
    if (query_cmd->parsed()) return RunQuery(query, g);
    if (tune_cmd->parsed()) return RunTune(tune, g);
    if (bench_cmd->parsed()) return RunBenchCommand(bench, g);
    if (export_cmd->parsed()) return RunExport(exp, g);
  } catch (const UsageError& e) {
    Diagnose(g, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    Diagnose(g, std::string(ErrorCodeName(e.code())), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    Diagnose(g, "runtime", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace xfertune

int main(int argc, char** argv) { return xfertune::Main(argc, argv); }
