/*
 * Copyright 2026 The CoExBO Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// JSON conversions shared by session persistence and the HTTP service.
#pragma once

#include "coexbo/engine.hpp"

#include <json.hpp>

namespace coexbo::codec {

using json = nlohmann::json;

json vec(const Vec& v);
Vec vec(const json& j, const char* what);
// Rows of the matrix as nested arrays.
json mat(const Mat& m);
Mat mat(const json& j, const char* what);

json objective(const ObjectiveDef& d);
ObjectiveDef objective(const json& j);

json config(const SessionConfig& c);
// Collects every field problem before throwing ConfigError.
SessionConfig config(const json& j);

json bundle(const ExplanationBundle& b);
ExplanationBundle bundle(const json& j);

json record(const IterationRecord& r);
IterationRecord record(const json& j);

json feedback(const SelectionFeedback& f);

}  // namespace coexbo::codec
