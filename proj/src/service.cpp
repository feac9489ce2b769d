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

#include "coexbo/service.hpp"

#include "json_codec.hpp"

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace coexbo {

namespace fs = std::filesystem;
using codec::json;

struct SessionService::Entry {
  std::mutex mu;
  std::string id;
  std::int64_t created_at_ms = 0;
  std::string idempotency_key;
  std::optional<Session> session;
};

namespace {

ServiceResponse reply(int status, const json& body) { return {status, body.dump()}; }

ServiceResponse error(int status, const std::string& message) {
  return reply(status, {{"error", message}});
}

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SessionService::SessionService(std::string data_dir) : dir_(std::move(data_dir)) {
  fs::create_directories(dir_);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    const std::string suffix = ".meta.json";
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    const json meta = json::parse(read_text(entry.path()));
    auto e = std::make_shared<Entry>();
    e->id = meta.at("id").get<std::string>();
    e->created_at_ms = meta.at("created_at_ms").get<std::int64_t>();
    e->idempotency_key = meta.at("idempotency_key").get<std::string>();
    e->session = load_session((fs::path(dir_) / (e->id + ".json")).string());
    if (!e->idempotency_key.empty()) by_key_[e->idempotency_key] = e->id;
    sessions_[e->id] = std::move(e);
  }
}

SessionService::~SessionService() = default;

std::size_t SessionService::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionService::persist(const Entry& e) const {
  save_session(*e.session, (fs::path(dir_) / (e.id + ".json")).string());
}

static json handle_json(const std::string& id, std::int64_t created, const Session& s,
                        const std::string& path) {
  return {{"id", id},
          {"created_at_ms", created},
          {"config", codec::config(s.config())},
          {"path", path},
          {"t", s.t()},
          {"phase", to_string(s.phase())}};
}

ServiceResponse SessionService::create_session(const std::string& body,
                                               const std::string& idempotency_key) {
  std::lock_guard create_lock(create_mu_);
  if (!idempotency_key.empty()) {
    std::string existing;
    {
      std::lock_guard lock(mu_);
      const auto it = by_key_.find(idempotency_key);
      if (it != by_key_.end()) existing = it->second;
    }
    if (!existing.empty()) {
      const auto e = find(existing);
      std::lock_guard lock(e->mu);
      return reply(201, handle_json(e->id, e->created_at_ms, *e->session,
                                    (fs::path(dir_) / (e->id + ".json")).string()));
    }
  }

  SessionConfig cfg;
  try {
    cfg = config_from_json(body.empty() ? "{}" : body);
  } catch (const ConfigError& err) {
    json errs = json::array();
    for (const FieldError& f : err.errors()) errs.push_back({{"field", f.field}, {"message", f.message}});
    return reply(400, {{"error", "invalid session config"}, {"errors", errs}});
  }

  auto e = std::make_shared<Entry>();
  e->id = new_session_id();
  e->created_at_ms = now_ms();
  e->idempotency_key = idempotency_key;
  e->session = Session::init(std::move(cfg));
  persist(*e);
  write_atomic(fs::path(dir_) / (e->id + ".meta.json"),
               json{{"id", e->id},
                    {"created_at_ms", e->created_at_ms},
                    {"idempotency_key", e->idempotency_key}}
                   .dump());
  const json handle = handle_json(e->id, e->created_at_ms, *e->session,
                                  (fs::path(dir_) / (e->id + ".json")).string());
  {
    std::lock_guard lock(mu_);
    if (!idempotency_key.empty()) by_key_[idempotency_key] = e->id;
    sessions_[e->id] = e;
  }
  return reply(201, handle);
}

ServiceResponse SessionService::get_candidates(const std::string& id) {
  const auto e = valid_id(id) ? find(id) : nullptr;
  if (!e) return error(404, "unknown session " + id);
  std::lock_guard lock(e->mu);
  Session& s = *e->session;
  if (s.phase() == Phase::ready) {
    if (s.finished()) return error(409, "the iteration budget is exhausted");
    s.step_candidates();
    persist(*e);
  }
  const PendingPair& p = *s.pending();
  return reply(200, {{"session_id", id},
                     {"t", s.t()},
                     {"x1", codec::vec(p.x1)},
                     {"x2", codec::vec(p.x2)},
                     {"explanation", p.bundle ? codec::bundle(*p.bundle) : json(nullptr)}});
}

ServiceResponse SessionService::post_choice(const std::string& id, const std::string& body) {
  const auto e = valid_id(id) ? find(id) : nullptr;
  if (!e) return error(404, "unknown session " + id);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    return error(400, "body must be JSON of the form {\"choice\": 1 | 2}");
  }
  if (!j.is_object() || !j.contains("choice") || !j["choice"].is_number_integer() ||
      (j["choice"] != 1 && j["choice"] != 2)) {
    return error(400, "choice must be 1 or 2");
  }
  if (j.contains("t") && !j["t"].is_number_integer()) return error(400, "t must be an integer");
  std::lock_guard lock(e->mu);
  Session& s = *e->session;
  if (s.phase() != Phase::awaiting_choice) {
    return error(409, "no candidate pair is awaiting a choice; fetch candidates first");
  }
  // Optional token: the iteration the client is answering.
  if (j.contains("t") && j["t"].get<int>() != s.t()) {
    return error(409, "choice refers to iteration " + std::to_string(j["t"].get<int>()) +
                          " but the pending pair belongs to iteration " + std::to_string(s.t()));
  }
  const IterationRecord& r = s.apply_choice(j["choice"].get<int>());
  persist(*e);
  return reply(200, {{"feedback", codec::feedback(r.feedback)},
                     {"observed_y", r.y},
                     {"t", s.t()},
                     {"regret", r.regret ? json(*r.regret) : json(nullptr)}});
}

ServiceResponse SessionService::get_history(const std::string& id) {
  const auto e = valid_id(id) ? find(id) : nullptr;
  if (!e) return error(404, "unknown session " + id);
  std::lock_guard lock(e->mu);
  json list = json::array();
  for (const IterationRecord& r : e->session->history()) list.push_back(codec::record(r));
  return reply(200, list);
}

ServiceResponse SessionService::healthz() const {
  return reply(200, {{"status", "ok"}, {"sessions", size()}, {"schema_version", kSessionSchemaVersion}});
}

BindAddress parse_bind_address(const std::string& text) {
  BindAddress b;
  if (text.empty()) return b;
  const auto colon = text.rfind(':');
  std::string port = text;
  if (colon != std::string::npos) {
    if (colon > 0) b.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    b.port = std::stoi(port, &used);
    if (used != port.size() || b.port < 0 || b.port > 65535) throw InputError("");
  } catch (const std::exception&) {
    throw InputError("invalid bind address '" + text + "'");
  }
  return b;
}

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;

  explicit Impl(SessionService& s) : service(s) {
    auto send = [](httplib::Response& res, const ServiceResponse& r) {
      res.status = r.status;
      res.set_header("X-Schema-Version", std::to_string(kSessionSchemaVersion));
      res.set_content(r.body, "application/json");
    };
    server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.create_session(req.body, req.get_header_value("Idempotency-Key")));
    });
    server.Get(R"(/sessions/([^/]+)/candidates)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.get_candidates(req.matches[1]));
               });
    server.Post(R"(/sessions/([^/]+)/choice)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, service.post_choice(req.matches[1], req.body));
                });
    server.Get(R"(/sessions/([^/]+)/history)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.get_history(req.matches[1]));
               });
    server.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.healthz());
    });
    server.set_exception_handler(
        [send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "internal error";
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          send(res, ServiceResponse{500, json{{"error", what}}.dump()});
        });
    server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send(res, ServiceResponse{res.status, json{{"error", "not found"}}.dump()});
      }
    });
  }
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace coexbo
