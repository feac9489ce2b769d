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

#pragma once

#include "coexbo/engine.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace coexbo {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Session store behind the HTTP endpoints. Each session lives in
/// {data_dir}/{id}.json next to a {id}.meta.json handle; both are rewritten
/// atomically after every state transition and reloaded on construction.
/// Requests on one session are serialized by a per-session mutex.
class SessionService {
 public:
  explicit SessionService(std::string data_dir);
  ~SessionService();

  ServiceResponse create_session(const std::string& body, const std::string& idempotency_key = "");
  ServiceResponse get_candidates(const std::string& id);
  ServiceResponse post_choice(const std::string& id, const std::string& body);
  ServiceResponse get_history(const std::string& id);
  ServiceResponse healthz() const;

  std::size_t size() const;
  const std::string& data_dir() const { return dir_; }

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(const Entry& e) const;

  std::string dir_;
  mutable std::mutex mu_;
  std::mutex create_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, std::string> by_key_;
};

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", ":port" or "port".
BindAddress parse_bind_address(const std::string& text);

inline constexpr const char* kBindEnv = "COEXBO_BIND";
inline constexpr const char* kDataDirEnv = "COEXBO_DATA_DIR";

/// HTTP front end. Routes: POST /sessions, GET /sessions/{id}/candidates,
/// POST /sessions/{id}/choice, GET /sessions/{id}/history, GET /healthz.
/// Every response carries an X-Schema-Version header.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coexbo
