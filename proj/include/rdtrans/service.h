/*
 * Copyright 2026 The rdtrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RDTRANS_SERVICE_H_
#define RDTRANS_SERVICE_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rdtrans/decision.h"

namespace rdtrans {

nlohmann::ordered_json RecommendationToJson(const Recommendation& rec);
nlohmann::ordered_json SavingsToJson(const SavingsReport& report);

struct AdvisoryResponse {
  int http_status = 200;
  nlohmann::ordered_json body;
};

// Handles one advisory request document. Never throws: malformed input
// yields a 400 (unparseable) or 422 (invalid) structured error, and a
// failure confined to one GOP is reported in that GOP's entry only.
// Responses list GOPs in the order they first appear in the request.
AdvisoryResponse HandleAdvisoryRequest(std::string_view body,
                                       const DecisionEngine& engine);

inline constexpr const char* kAdvisoryRoute = "/v1/recommend";

// HTTP front end for HandleAdvisoryRequest over a shared immutable engine.
class AdvisoryServer {
 public:
  explicit AdvisoryServer(std::shared_ptr<const DecisionEngine> engine);
  ~AdvisoryServer();

  AdvisoryServer(const AdvisoryServer&) = delete;
  AdvisoryServer& operator=(const AdvisoryServer&) = delete;

  // Binds |host|:|port|; port 0 picks a free port. Returns the bound port
  // or throws kInput on failure.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Requires a prior Bind().
  void Listen();
  // Blocks until a concurrent Listen() is accepting connections.
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses "host:port" (host optional, defaults to 127.0.0.1).
std::pair<std::string, int> ParseBindAddress(std::string_view text);

}  // namespace rdtrans

#endif  // RDTRANS_SERVICE_H_
