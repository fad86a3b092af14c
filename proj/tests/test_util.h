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

#ifndef XFERTUNE_TESTS_TEST_UTIL_H_
#define XFERTUNE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "xfertune/dtree.h"
#include "xfertune/logstore.h"

namespace xfertune::testing {

inline std::string TestdataPath(const std::string& name) {
  return std::string(XFERTUNE_TESTDATA_DIR) + "/" + name;
}

inline std::shared_ptr<const LogTable> Table1() {
  static const auto table =
      std::make_shared<const LogTable>(ReadLogFile(TestdataPath("table1.csv")));
  return table;
}

inline std::vector<int64_t> Sorted(std::vector<int64_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Leaf entry sets of a tree, each sorted, in node order.
inline std::vector<std::vector<int64_t>> LeafGroups(const DecisionTree& tree) {
  std::vector<std::vector<int64_t>> groups;
  for (const TreeNode& node : tree.nodes()) {
    if (node.is_leaf()) groups.push_back(Sorted(tree.EntryNos(node)));
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

inline BuildConfig ForcedConfig(std::vector<Attribute> forced,
                                int cut_number = 4) {
  BuildConfig config;
  config.forced_attributes = std::move(forced);
  config.cut_number = cut_number;
  return config;
}

}  // namespace xfertune::testing

#endif  // XFERTUNE_TESTS_TEST_UTIL_H_
