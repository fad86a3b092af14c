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

#ifndef XFERTUNE_DTREE_H_
#define XFERTUNE_DTREE_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xfertune/logstore.h"
#include "xfertune/ranking.h"

namespace xfertune {

// Condition on the edge from a node to one of its children.
struct Edge {
  enum class Kind { kValue, kInterval };

  Kind kind = Kind::kValue;
  double value = 0;  // kValue
  double lo = 0;     // kInterval: (lo, hi], or [lo, hi] when closed_low
  double hi = 0;
  bool closed_low = false;

  static Edge Exact(double v) { return Edge{Kind::kValue, v, 0, 0, false}; }
  static Edge Interval(double lo, double hi, bool closed_low) {
    return Edge{Kind::kInterval, 0, lo, hi, closed_low};
  }

  bool Contains(double v) const;
  // Point used for nearest-child resolution: the value or interval midpoint.
  double Anchor() const;
  std::string Label(Attribute attribute) const;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct TreeNode {
  int id = 0;
  int depth = 1;                        // root is depth 1
  std::vector<size_t> rows;             // training-table rows, ascending
  std::optional<Attribute> cut_attribute;
  std::vector<Edge> edges;              // parallel to `children`
  std::vector<int> children;

  bool is_leaf() const { return children.empty(); }
};

struct BuildConfig {
  int leaf_threshold = 2;
  int cut_number = 4;
  Metric metric = Metric::kDiversityIndex;
  bool no_reuse_attributes = true;
  bool normalize_spread = true;
  // Attribute to cut on at each depth (index 0 = root), overriding the
  // metric while the attribute is usable at that node.
  std::vector<Attribute> forced_attributes;

  void Check() const;
};

struct ChildCut {
  Edge edge;
  std::vector<size_t> rows;
};

// Splits `rows` on `attribute`. With at most `cut_number` distinct values one
// child per value is produced; otherwise [min, max] is split into
// `cut_number` equal-width intervals and empty intervals are dropped.
// Throws kDegenerateCut when all rows share one value.
std::vector<ChildCut> CutNode(const LogTable& table,
                              std::span<const size_t> rows,
                              Attribute attribute, int cut_number);

class DecisionTree {
 public:
  // Throws kEmptyTable on an empty table.
  static DecisionTree Build(std::shared_ptr<const LogTable> table,
                            const BuildConfig& config);

  // Assembles a tree from already-validated parts (deserialization).
  static DecisionTree FromParts(std::shared_ptr<const LogTable> table,
                                const BuildConfig& config,
                                std::vector<TreeNode> nodes);

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(int id) const { return nodes_.at(id); }
  std::span<const TreeNode> nodes() const { return nodes_; }
  const BuildConfig& config() const { return config_; }
  const LogTable& table() const { return *table_; }
  const std::shared_ptr<const LogTable>& table_ptr() const { return table_; }

  // Root-down descent. At each internal node the child whose edge contains
  // the key's value is taken; failing that, the child whose anchor is
  // nearest. Always ends at a leaf.
  const TreeNode& Traverse(const AttributeKey& key) const;

  std::vector<int64_t> EntryNos(const TreeNode& node) const;
  int Height() const;
  size_t LeafCount() const;

  // Graphviz rendering, one line per edge labeled with its cut condition.
  std::string ToDot(std::string_view graph_name = "tree") const;

 private:
  DecisionTree(std::shared_ptr<const LogTable> table, BuildConfig config,
               std::vector<TreeNode> nodes)
      : table_(std::move(table)),
        config_(std::move(config)),
        nodes_(std::move(nodes)) {}

  std::shared_ptr<const LogTable> table_;
  BuildConfig config_;
  std::vector<TreeNode> nodes_;
};

// A DI-built and an SD-built tree over the same logs. Matches are the union
// of both trees' matched nodes.
class TreeBand {
 public:
  static TreeBand Build(std::shared_ptr<const LogTable> table,
                        const BuildConfig& base);
  // Throws kInvalidArgument when the trees use different tables.
  TreeBand(DecisionTree tree_di, DecisionTree tree_sd);

  const DecisionTree& tree_di() const { return tree_di_; }
  const DecisionTree& tree_sd() const { return tree_sd_; }
  const LogTable& table() const { return tree_di_.table(); }

  // Rows (ascending, deduplicated) of the union of both matched nodes.
  std::vector<size_t> MatchRows(const AttributeKey& key) const;
  LogTable Match(const AttributeKey& key) const;

 private:
  DecisionTree tree_di_;
  DecisionTree tree_sd_;
};

}  // namespace xfertune

#endif  // XFERTUNE_DTREE_H_
