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

#include "xfertune/model_io.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "xfertune/error.h"

namespace xfertune {
namespace {

using nlohmann::json;

json LogsToJson(const LogTable& table) {
  json rows = json::array();
  for (const TransferLogEntry& e : table.entries()) {
    rows.push_back({e.entry_no, e.file_size_kb, e.num_files, e.rtt_ms,
                    e.buf_size_mb, e.bandwidth_mbps, e.throughput_mbps,
                    e.energy_j, e.theta.cc, e.theta.p, e.theta.pp,
                    e.theta.cpu_num, e.theta.cpu_freq_ghz});
  }
  return {{"provenance", table.provenance()}, {"rows", rows}};
}

std::shared_ptr<const LogTable> LogsFromJson(const json& j) {
  std::vector<TransferLogEntry> entries;
  for (const json& r : j.at("rows")) {
    if (!r.is_array() || r.size() != 13) {
      throw Error(ErrorCode::kMalformedModel, "log row must have 13 fields");
    }
    TransferLogEntry e;
    e.entry_no = r[0].get<int64_t>();
    e.file_size_kb = r[1].get<double>();
    e.num_files = r[2].get<int64_t>();
    e.rtt_ms = r[3].get<double>();
    e.buf_size_mb = r[4].get<double>();
    e.bandwidth_mbps = r[5].get<double>();
    e.throughput_mbps = r[6].get<double>();
    e.energy_j = r[7].get<double>();
    e.theta.cc = r[8].get<int>();
    e.theta.p = r[9].get<int>();
    e.theta.pp = r[10].get<int>();
    e.theta.cpu_num = r[11].get<int>();
    e.theta.cpu_freq_ghz = r[12].get<double>();
    entries.push_back(e);
  }
  if (entries.empty()) {
    throw Error(ErrorCode::kMalformedModel, "model carries no logs");
  }
  try {
    return std::make_shared<const LogTable>(
        std::move(entries), j.at("provenance").get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedModel, e.what());
  }
}

Attribute ParseAttribute(const json& j) {
  auto a = AttributeFromName(j.get<std::string>());
  if (!a) throw Error(ErrorCode::kMalformedModel, "unknown attribute");
  return *a;
}

Metric ParseMetric(const json& j) {
  std::string name = j.get<std::string>();
  for (Metric m : {Metric::kDiversityIndex, Metric::kStdDev, Metric::kVariance}) {
    if (MetricName(m) == name) return m;
  }
  throw Error(ErrorCode::kMalformedModel, "unknown metric " + name);
}

json ConfigToJson(const BuildConfig& c) {
  json forced = json::array();
  for (Attribute a : c.forced_attributes) forced.push_back(AttributeName(a));
  return {{"leaf_threshold", c.leaf_threshold},
          {"cut_number", c.cut_number},
          {"metric", MetricName(c.metric)},
          {"no_reuse_attributes", c.no_reuse_attributes},
          {"normalize_spread", c.normalize_spread},
          {"forced_attributes", forced}};
}

BuildConfig ConfigFromJson(const json& j) {
  BuildConfig c;
  c.leaf_threshold = j.at("leaf_threshold").get<int>();
  c.cut_number = j.at("cut_number").get<int>();
  c.metric = ParseMetric(j.at("metric"));
  c.no_reuse_attributes = j.at("no_reuse_attributes").get<bool>();
  c.normalize_spread = j.at("normalize_spread").get<bool>();
  for (const json& a : j.at("forced_attributes")) {
    c.forced_attributes.push_back(ParseAttribute(a));
  }
  try {
    c.Check();
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedModel, e.what());
  }
  return c;
}

json EdgeToJson(const Edge& e) {
  if (e.kind == Edge::Kind::kValue) {
    return {{"kind", "value"}, {"value", e.value}};
  }
  return {{"kind", "interval"},
          {"lo", e.lo},
          {"hi", e.hi},
          {"closed_low", e.closed_low}};
}

Edge EdgeFromJson(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "value") return Edge::Exact(j.at("value").get<double>());
  if (kind == "interval") {
    return Edge::Interval(j.at("lo").get<double>(), j.at("hi").get<double>(),
                          j.at("closed_low").get<bool>());
  }
  throw Error(ErrorCode::kMalformedModel, "unknown edge kind " + kind);
}

json TreeToJson(const DecisionTree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes()) {
    json edges = json::array();
    for (const Edge& e : n.edges) edges.push_back(EdgeToJson(e));
    nodes.push_back(
        {{"id", n.id},
         {"depth", n.depth},
         {"attribute", n.cut_attribute ? json(AttributeName(*n.cut_attribute))
                                       : json(nullptr)},
         {"edges", edges},
         {"children", n.children},
         {"log_ids", tree.EntryNos(n)}});
  }
  return {{"config", ConfigToJson(tree.config())}, {"nodes", nodes}};
}

// Rebuilds nodes and checks the structural invariants: dense ids, forward
// child links, matching edge counts and children partitioning their parent.
DecisionTree TreeFromJson(const json& j,
                          std::shared_ptr<const LogTable> table) {
  BuildConfig config = ConfigFromJson(j.at("config"));
  std::vector<TreeNode> nodes;
  for (const json& jn : j.at("nodes")) {
    TreeNode n;
    n.id = jn.at("id").get<int>();
    n.depth = jn.at("depth").get<int>();
    if (n.id != static_cast<int>(nodes.size())) {
      throw Error(ErrorCode::kMalformedModel, "node ids must be dense");
    }
    if (!jn.at("attribute").is_null()) {
      n.cut_attribute = ParseAttribute(jn.at("attribute"));
    }
    for (const json& e : jn.at("edges")) n.edges.push_back(EdgeFromJson(e));
    n.children = jn.at("children").get<std::vector<int>>();
    for (int64_t entry_no : jn.at("log_ids").get<std::vector<int64_t>>()) {
      auto row = table->RowOf(entry_no);
      if (!row) {
        throw Error(ErrorCode::kMalformedModel,
                    "unknown log id " + std::to_string(entry_no));
      }
      n.rows.push_back(*row);
    }
    std::sort(n.rows.begin(), n.rows.end());
    nodes.push_back(std::move(n));
  }
  if (nodes.empty()) throw Error(ErrorCode::kMalformedModel, "no nodes");
  if (nodes.front().rows.size() != table->size()) {
    throw Error(ErrorCode::kMalformedModel, "root must hold every log");
  }
  for (const TreeNode& n : nodes) {
    if (n.edges.size() != n.children.size() ||
        n.cut_attribute.has_value() == n.children.empty()) {
      throw Error(ErrorCode::kMalformedModel,
                  "inconsistent node " + std::to_string(n.id));
    }
    size_t covered = 0;
    for (int child : n.children) {
      if (child <= n.id || child >= static_cast<int>(nodes.size())) {
        throw Error(ErrorCode::kMalformedModel, "bad child link");
      }
      const auto& rows = nodes[child].rows;
      if (!std::includes(n.rows.begin(), n.rows.end(), rows.begin(),
                         rows.end())) {
        throw Error(ErrorCode::kMalformedModel, "child logs outside parent");
      }
      covered += rows.size();
    }
    if (!n.children.empty() && covered != n.rows.size()) {
      throw Error(ErrorCode::kMalformedModel, "children do not partition");
    }
  }
  return DecisionTree::FromParts(std::move(table), config, std::move(nodes));
}

json ParseDocument(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedModel,
                std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorCode::kMalformedModel, "model lacks schema_version");
  }
  const json& version = doc["schema_version"];
  int v = version.is_number_integer()
              ? version.get<int>()
              : version.is_string() ? std::atoi(version.get<std::string>().c_str())
                                    : -1;
  if (v != kModelSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "model schema version " + version.dump() +
                    " is not supported (reader version " +
                    std::to_string(kModelSchemaVersion) + ")");
  }
  return doc;
}

template <typename F>
auto Guarded(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedModel,
                std::string("malformed model: ") + e.what());
  }
}

std::string Document(std::string_view kind, const LogTable& table,
                     json trees) {
  json doc = {{"schema_version", kModelSchemaVersion},
              {"kind", kind},
              {"logs", LogsToJson(table)},
              {"trees", std::move(trees)}};
  return doc.dump();
}

}  // namespace

std::string SerializeTree(const DecisionTree& tree) {
  return Document("tree", tree.table(), json::array({TreeToJson(tree)}));
}

std::string SerializeBand(const TreeBand& band) {
  return Document(
      "band", band.table(),
      json::array({TreeToJson(band.tree_di()), TreeToJson(band.tree_sd())}));
}

std::string ModelKind(std::string_view text) {
  json doc = ParseDocument(text);
  return Guarded([&] { return doc.at("kind").get<std::string>(); });
}

DecisionTree DeserializeTree(std::string_view text) {
  json doc = ParseDocument(text);
  return Guarded([&] {
    auto table = LogsFromJson(doc.at("logs"));
    const json& trees = doc.at("trees");
    if (!trees.is_array() || trees.empty()) {
      throw Error(ErrorCode::kMalformedModel, "model has no trees");
    }
    return TreeFromJson(trees[0], table);
  });
}

TreeBand DeserializeBand(std::string_view text) {
  json doc = ParseDocument(text);
  return Guarded([&] {
    auto table = LogsFromJson(doc.at("logs"));
    const json& trees = doc.at("trees");
    if (doc.at("kind").get<std::string>() != "band" || !trees.is_array() ||
        trees.size() != 2) {
      throw Error(ErrorCode::kMalformedModel, "band model needs two trees");
    }
    return TreeBand(TreeFromJson(trees[0], table),
                    TreeFromJson(trees[1], table));
  });
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
}

}  // namespace xfertune
