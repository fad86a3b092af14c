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

#include "xfertune/dtree.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iterator>
#include <numeric>
#include <sstream>

#include "xfertune/error.h"

namespace xfertune {

bool Edge::Contains(double v) const {
  if (kind == Kind::kValue) return v == value;
  return (closed_low ? v >= lo : v > lo) && v <= hi;
}

double Edge::Anchor() const {
  return kind == Kind::kValue ? value : 0.5 * (lo + hi);
}

std::string Edge::Label(Attribute attribute) const {
  std::ostringstream out;
  out << AttributeName(attribute);
  if (kind == Kind::kValue) {
    out << " = " << value;
  } else {
    out << " in " << (closed_low ? "[" : "(") << lo << ", " << hi << "]";
  }
  return out.str();
}

void BuildConfig::Check() const {
  if (leaf_threshold < 1) {
    throw Error(ErrorCode::kInvalidArgument, "leaf_threshold must be >= 1");
  }
  if (cut_number < 2) {
    throw Error(ErrorCode::kInvalidArgument, "cut_number must be >= 2");
  }
}

std::vector<ChildCut> CutNode(const LogTable& table,
                              std::span<const size_t> rows,
                              Attribute attribute, int cut_number) {
  if (cut_number < 2) {
    throw Error(ErrorCode::kInvalidArgument, "cut_number must be >= 2");
  }
  std::vector<double> column = AttributeColumn(table, rows, attribute);
  std::vector<double> distinct = column;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kDegenerateCut,
                "all logs share one value of " +
                    std::string(AttributeName(attribute)));
  }

  std::vector<ChildCut> children;
  if (distinct.size() <= static_cast<size_t>(cut_number)) {
    children.reserve(distinct.size());
    for (double v : distinct) children.push_back({Edge::Exact(v), {}});
    for (size_t i = 0; i < rows.size(); ++i) {
      auto it = std::lower_bound(distinct.begin(), distinct.end(), column[i]);
      children[static_cast<size_t>(it - distinct.begin())].rows.push_back(
          rows[i]);
    }
    return children;
  }

  const double lo = distinct.front();
  const double hi = distinct.back();
  const double width = (hi - lo) / cut_number;
  std::vector<double> upper(cut_number);
  for (int k = 0; k < cut_number; ++k) upper[k] = lo + (k + 1) * width;
  upper.back() = hi;

  std::vector<ChildCut> bins(cut_number);
  for (int k = 0; k < cut_number; ++k) {
    double bin_lo = k == 0 ? lo : upper[k - 1];
    bins[k].edge = Edge::Interval(bin_lo, upper[k], k == 0);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    auto it = std::lower_bound(upper.begin(), upper.end(), column[i]);
    size_t k = std::min(static_cast<size_t>(it - upper.begin()),
                        upper.size() - 1);
    bins[k].rows.push_back(rows[i]);
  }
  for (ChildCut& bin : bins) {
    if (!bin.rows.empty()) children.push_back(std::move(bin));
  }
  return children;
}

namespace {

using AttributeMask = unsigned;

bool Used(AttributeMask mask, Attribute a) {
  return (mask >> static_cast<int>(a)) & 1u;
}

std::vector<Attribute> Remaining(AttributeMask used) {
  std::vector<Attribute> remaining;
  for (Attribute a : kAllAttributes) {
    if (!Used(used, a)) remaining.push_back(a);
  }
  return remaining;
}

bool Constant(const LogTable& table, std::span<const size_t> rows,
              Attribute a) {
  double first = KeyOf(table[rows.front()]).Get(a);
  return std::all_of(rows.begin(), rows.end(), [&](size_t r) {
    return KeyOf(table[r]).Get(a) == first;
  });
}

// A node stops splitting when it is small enough, when nothing is left to
// cut on, or when its logs are indistinguishable on what is left.
bool IsLeaf(const LogTable& table, std::span<const size_t> rows,
            const std::vector<Attribute>& remaining, int leaf_threshold) {
  if (rows.size() <= static_cast<size_t>(leaf_threshold)) return true;
  if (remaining.empty()) return true;
  return std::all_of(remaining.begin(), remaining.end(), [&](Attribute a) {
    return Constant(table, rows, a);
  });
}

}  // namespace

DecisionTree DecisionTree::Build(std::shared_ptr<const LogTable> table,
                                 const BuildConfig& config) {
  config.Check();
  if (!table || table->empty()) {
    throw Error(ErrorCode::kEmptyTable, "cannot build a tree from no logs");
  }
  const LogTable& logs = *table;
  RankOptions rank_options;
  rank_options.metric = config.metric;
  rank_options.normalize_spread = config.normalize_spread;

  std::vector<TreeNode> nodes(1);
  std::vector<AttributeMask> used(1, 0);
  nodes[0].id = 0;
  nodes[0].depth = 1;
  nodes[0].rows.resize(logs.size());
  std::iota(nodes[0].rows.begin(), nodes[0].rows.end(), size_t{0});

  std::deque<int> worklist;
  if (!IsLeaf(logs, nodes[0].rows, Remaining(0), config.leaf_threshold)) {
    worklist.push_back(0);
  }

  while (!worklist.empty()) {
    const int id = worklist.front();
    worklist.pop_front();
    const AttributeMask mask = used[id];
    const int depth = nodes[id].depth;

    std::vector<Attribute> candidates;
    for (Attribute a : config.no_reuse_attributes ? Remaining(mask)
                                                  : Remaining(0)) {
      if (!Constant(logs, nodes[id].rows, a)) candidates.push_back(a);
    }
    // IsLeaf guarantees at least one usable attribute for queued nodes.
    Attribute chosen = candidates.front();
    size_t level = static_cast<size_t>(depth - 1);
    if (level < config.forced_attributes.size() &&
        std::find(candidates.begin(), candidates.end(),
                  config.forced_attributes[level]) != candidates.end()) {
      chosen = config.forced_attributes[level];
    } else {
      chosen = RankAttributes(logs, nodes[id].rows, candidates, rank_options)
                   .front()
                   .attribute;
    }

    std::vector<ChildCut> cuts =
        CutNode(logs, nodes[id].rows, chosen, config.cut_number);
    const AttributeMask child_mask =
        config.no_reuse_attributes
            ? mask | (1u << static_cast<int>(chosen))
            : 0;
    const std::vector<Attribute> child_remaining = Remaining(child_mask);

    nodes[id].cut_attribute = chosen;
    for (ChildCut& cut : cuts) {
      TreeNode child;
      child.id = static_cast<int>(nodes.size());
      child.depth = depth + 1;
      child.rows = std::move(cut.rows);
      bool leaf =
          IsLeaf(logs, child.rows, child_remaining, config.leaf_threshold);
      nodes[id].edges.push_back(cut.edge);
      nodes[id].children.push_back(child.id);
      if (!leaf) worklist.push_back(child.id);
      nodes.push_back(std::move(child));
      used.push_back(child_mask);
    }
  }
  return DecisionTree(std::move(table), config, std::move(nodes));
}

DecisionTree DecisionTree::FromParts(std::shared_ptr<const LogTable> table,
                                     const BuildConfig& config,
                                     std::vector<TreeNode> nodes) {
  if (!table || nodes.empty()) {
    throw Error(ErrorCode::kMalformedModel, "tree has no nodes");
  }
  return DecisionTree(std::move(table), config, std::move(nodes));
}

const TreeNode& DecisionTree::Traverse(const AttributeKey& key) const {
  const TreeNode* current = &nodes_.front();
  while (!current->is_leaf()) {
    const double v = key.Get(*current->cut_attribute);
    size_t pick = current->children.size();
    for (size_t i = 0; i < current->edges.size(); ++i) {
      if (current->edges[i].Contains(v)) {
        pick = i;
        break;
      }
    }
    if (pick == current->children.size()) {
      double best = 0;
      for (size_t i = 0; i < current->edges.size(); ++i) {
        double distance = std::abs(current->edges[i].Anchor() - v);
        if (i == 0 || distance < best) {
          best = distance;
          pick = i;
        }
      }
    }
    current = &nodes_[current->children[pick]];
  }
  return *current;
}

std::vector<int64_t> DecisionTree::EntryNos(const TreeNode& node) const {
  std::vector<int64_t> ids;
  ids.reserve(node.rows.size());
  for (size_t row : node.rows) ids.push_back((*table_)[row].entry_no);
  return ids;
}

int DecisionTree::Height() const {
  int height = 0;
  for (const TreeNode& n : nodes_) height = std::max(height, n.depth);
  return height;
}

size_t DecisionTree::LeafCount() const {
  return static_cast<size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [](const TreeNode& n) { return n.is_leaf(); }));
}

std::string DecisionTree::ToDot(std::string_view graph_name) const {
  std::ostringstream out;
  out << "digraph " << graph_name << " {\n";
  for (const TreeNode& n : nodes_) {
    out << "  n" << n.id << " [label=\"" << n.id << " (" << n.rows.size()
        << " logs)\"];\n";
  }
  for (const TreeNode& n : nodes_) {
    for (size_t i = 0; i < n.children.size(); ++i) {
      out << "  n" << n.id << " -> n" << n.children[i] << " [label=\""
          << n.edges[i].Label(*n.cut_attribute) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

TreeBand TreeBand::Build(std::shared_ptr<const LogTable> table,
                         const BuildConfig& base) {
  BuildConfig di = base;
  di.metric = Metric::kDiversityIndex;
  BuildConfig sd = base;
  sd.metric = Metric::kStdDev;
  DecisionTree tree_di = DecisionTree::Build(table, di);
  DecisionTree tree_sd = DecisionTree::Build(table, sd);
  return TreeBand(std::move(tree_di), std::move(tree_sd));
}

TreeBand::TreeBand(DecisionTree tree_di, DecisionTree tree_sd)
    : tree_di_(std::move(tree_di)), tree_sd_(std::move(tree_sd)) {
  if (tree_di_.table_ptr() != tree_sd_.table_ptr()) {
    throw Error(ErrorCode::kInvalidArgument,
                "band trees must share one training table");
  }
}

std::vector<size_t> TreeBand::MatchRows(const AttributeKey& key) const {
  const std::vector<size_t>& a = tree_di_.Traverse(key).rows;
  const std::vector<size_t>& b = tree_sd_.Traverse(key).rows;
  std::vector<size_t> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(merged));
  return merged;
}

LogTable TreeBand::Match(const AttributeKey& key) const {
  std::vector<size_t> rows = MatchRows(key);
  return table().Select(rows);
}

}  // namespace xfertune
