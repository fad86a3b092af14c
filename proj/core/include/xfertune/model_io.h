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

#ifndef XFERTUNE_MODEL_IO_H_
#define XFERTUNE_MODEL_IO_H_

#include <string>
#include <string_view>

#include "xfertune/dtree.h"

namespace xfertune {

inline constexpr int kModelSchemaVersion = 1;

// Versioned JSON documents. The training logs are embedded so a model file is
// self-contained: {schema_version, kind, logs, trees:[{config, nodes}]}.
std::string SerializeTree(const DecisionTree& tree);
std::string SerializeBand(const TreeBand& band);

// Throw kSchemaVersionMismatch for a foreign schema_version and
// kMalformedModel for anything structurally wrong.
DecisionTree DeserializeTree(std::string_view text);
TreeBand DeserializeBand(std::string_view text);

// "tree" or "band", read from a model document without building it.
std::string ModelKind(std::string_view text);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view contents);

}  // namespace xfertune

#endif  // XFERTUNE_MODEL_IO_H_
