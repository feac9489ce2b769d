#include "coexbo/service.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <filesystem>
#include <thread>

using namespace coexbo;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"({
  "objective": "gaussian_bump", "n_obj": 5, "n_pref": 12, "T": 3, "n_mc": 64,
  "seed": 4, "human": {"source": "interactive"}
})";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("coexbo_service_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string create(SessionService& svc) {
  const ServiceResponse r = svc.create_session(kSmallConfig);
  REQUIRE(r.status == 201);
  return json::parse(r.body).at("id").get<std::string>();
}

}  // namespace

TEST_CASE("create validates the config") {
  TempDir dir("create");
  SessionService svc(dir.path.string());
  ServiceResponse r = svc.create_session(R"({"gamma": 0, "n_obj": 1})");
  CHECK(r.status == 400);
  const json body = json::parse(r.body);
  REQUIRE(body.at("errors").size() == 2);
  CHECK(body["errors"][0]["field"] == "n_obj");
  CHECK(body["errors"][1]["field"] == "gamma");
  CHECK(svc.create_session("{broken").status == 400);
  CHECK(svc.create_session(R"({"objective": "nope"})").status == 400);

  r = svc.create_session(kSmallConfig, "key-1");
  CHECK(r.status == 201);
  const ServiceResponse again = svc.create_session(kSmallConfig, "key-1");
  CHECK(again.status == 201);
  CHECK(json::parse(again.body)["id"] == json::parse(r.body)["id"]);
  CHECK(svc.size() == 1);
}

TEST_CASE("candidates are idempotent and choices alternate") {
  TempDir dir("loop");
  SessionService svc(dir.path.string());
  const std::string id = create(svc);

  const ServiceResponse h0 = svc.get_history(id);
  CHECK(h0.status == 200);
  CHECK(json::parse(h0.body).empty());

  CHECK(svc.post_choice(id, R"({"choice": 1})").status == 409);
  const ServiceResponse c1 = svc.get_candidates(id);
  const ServiceResponse c2 = svc.get_candidates(id);
  REQUIRE(c1.status == 200);
  CHECK(c1.body == c2.body);
  const json cand = json::parse(c1.body);
  CHECK(cand["t"] == 1);
  const json& heat = cand.at("explanation").at("heatmaps");
  CHECK(heat["rows"] == 64);
  CHECK(heat["cols"] == 64);
  CHECK(heat["gp_mean"].size() == 64);
  CHECK(heat["gp_mean"][0].size() == 64);
  CHECK(heat["belief"].size() == 64);
  CHECK(cand["explanation"]["candidates"].size() == 2);

  CHECK(svc.post_choice(id, R"({"choice": 3})").status == 400);
  CHECK(svc.post_choice(id, "nonsense").status == 400);
  CHECK(svc.post_choice(id, R"({"choice": 1, "t": 7})").status == 409);

  const ServiceResponse ok = svc.post_choice(id, R"({"choice": 2, "t": 1})");
  REQUIRE(ok.status == 200);
  const json fb = json::parse(ok.body);
  CHECK(fb["t"] == 2);
  CHECK(fb["feedback"]["prob_mean"].get<double>() >= 0.0);
  CHECK(fb["feedback"]["prob_mean"].get<double>() <= 1.0);
  // The same answer submitted twice: the second finds no pending pair.
  CHECK(svc.post_choice(id, R"({"choice": 2, "t": 1})").status == 409);

  const json hist = json::parse(svc.get_history(id).body);
  REQUIRE(hist.size() == 1);
  CHECK(hist[0]["choice"] == 2);
  const Session on_disk = load_session((dir.path / (id + ".json")).string());
  REQUIRE(on_disk.history().size() == 1);
  CHECK(hist[0]["y"].get<double>() == on_disk.history()[0].y);

  CHECK(svc.get_candidates("ffff").status == 404);
  CHECK(svc.get_history("../etc").status == 404);
  CHECK(svc.post_choice("ffff", R"({"choice": 1})").status == 404);
}

TEST_CASE("budget exhaustion") {
  TempDir dir("budget");
  SessionService svc(dir.path.string());
  const std::string id = create(svc);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(svc.get_candidates(id).status == 200);
    REQUIRE(svc.post_choice(id, R"({"choice": 1})").status == 200);
  }
  CHECK(svc.get_candidates(id).status == 409);
  CHECK(json::parse(svc.get_history(id).body).size() == 3);
}

TEST_CASE("restart restores sessions and re-serves the pending pair") {
  TempDir dir("restart");
  std::string id, body;
  {
    SessionService svc(dir.path.string());
    id = create(svc);
    svc.create_session(kSmallConfig, "abc");
    body = svc.get_candidates(id).body;
  }
  SessionService svc(dir.path.string());
  CHECK(svc.size() == 2);
  CHECK(svc.get_candidates(id).body == body);
  CHECK(svc.post_choice(id, R"({"choice": 1})").status == 200);
  const ServiceResponse again = svc.create_session(kSmallConfig, "abc");
  CHECK(again.status == 201);
  CHECK(svc.size() == 2);
}

TEST_CASE("bind address parsing") {
  CHECK(parse_bind_address("0.0.0.0:9000").host == "0.0.0.0");
  CHECK(parse_bind_address("0.0.0.0:9000").port == 9000);
  CHECK(parse_bind_address(":81").host == "127.0.0.1");
  CHECK(parse_bind_address("82").port == 82);
  CHECK_THROWS_AS(parse_bind_address("host:abc"), InputError);
}

TEST_CASE("endpoints over HTTP") {
  TempDir dir("http");
  SessionService svc(dir.path.string());
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread th([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(120, 0);
  auto health = cli.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("X-Schema-Version") == "2");

  auto created = cli.Post("/sessions", httplib::Headers{{"Idempotency-Key", "k"}}, kSmallConfig,
                          "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json::parse(created->body)["id"];
  auto dup = cli.Post("/sessions", httplib::Headers{{"Idempotency-Key", "k"}}, kSmallConfig,
                      "application/json");
  CHECK(json::parse(dup->body)["id"] == id);

  auto bad = cli.Post("/sessions", R"({"gamma": -1})", "application/json");
  CHECK(bad->status == 400);

  auto c1 = cli.Get("/sessions/" + id + "/candidates");
  auto c2 = cli.Get("/sessions/" + id + "/candidates");
  REQUIRE(c1);
  CHECK(c1->status == 200);
  CHECK(c1->body == c2->body);
  auto choice = cli.Post("/sessions/" + id + "/choice", R"({"choice": 1})", "application/json");
  CHECK(choice->status == 200);
  CHECK(json::parse(choice->body)["t"] == 2);
  auto twice = cli.Post("/sessions/" + id + "/choice", R"({"choice": 1})", "application/json");
  CHECK(twice->status == 409);
  auto hist = cli.Get("/sessions/" + id + "/history");
  CHECK(json::parse(hist->body).size() == 1);
  CHECK(cli.Get("/sessions/nope/history")->status == 404);
  CHECK(cli.Get("/nowhere")->status == 404);

  server.stop();
  th.join();
}
