/*
 * Copyright 2026 The Ladder Authors.
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

#ifndef LADDER_SRC_HTTP_HPP_
#define LADDER_SRC_HTTP_HPP_

#include <string>

#include "json.hpp"
#include "ladder/llm_client.hpp"

namespace ladder::internal {

// POSTs `body` as JSON and returns the raw 2xx response body, applying the
// retry/auth policy of HttpSettings.
std::string PostJsonWithRetry(const HttpSettings& settings, const nlohmann::json& body);

}  // namespace ladder::internal

#endif  // LADDER_SRC_HTTP_HPP_
