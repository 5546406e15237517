#include "qplan/http_api.hpp"

#include <iostream>
#include <vector>

#include "httplib.h"

namespace qplan {

namespace {

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ValidationError("body", std::string("invalid JSON: ") + e.what());
  }
}

ApiResponse error(int status, const std::string& message, const std::string& field = {}) {
  json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  return {status, std::move(body)};
}

struct MethodNotAllowed {};

}  // namespace

ApiResponse ApiRouter::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return dispatch(method, path, std::string(body));
  } catch (const MethodNotAllowed&) {
    return error(405, "method not allowed");
  } catch (const ValidationError& e) {
    return error(422, e.what(), e.field());
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const ConflictError& e) {
    return error(409, e.what());
  } catch (const json::exception& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

ApiResponse ApiRouter::dispatch(std::string_view method, std::string_view path, const std::string& body) {
  const auto p = split_path(path);
  auto expect = [&](std::string_view m) {
    if (method != m) throw MethodNotAllowed{};
  };

  if (p.size() == 1 && p[0] == "clients") {
    expect("POST");
    json j = parse_body(body);
    // Accept either the bare spec or {"hardware": spec}.
    const json& hw = j.contains("hardware") ? j["hardware"] : j;
    const std::string id = service_.register_client(hw.get<HardwareSpec>());
    return {201, json{{"client_id", id}}};
  }
  if (p.size() == 3 && p[0] == "clients" && p[2] == "interview") {
    expect("POST");
    json j = parse_body(body);
    const auto scenario = parse_label<Scenario>(get_field<std::string>(j, "scenario"), "scenario");
    std::optional<HardwareSpec> hw;
    if (j.contains("hardware")) hw = get_field<HardwareSpec>(j, "hardware");
    const auto start = service_.start_interview(p[1], scenario, hw);
    return {201, json{{"session_id", start.session_id}, {"agent_message", start.agent_message}}};
  }
  if (p.size() == 3 && p[0] == "clients" && p[2] == "profile") {
    expect("GET");
    return {200, json(service_.profile(p[1]))};
  }
  if (p.size() == 3 && p[0] == "clients" && p[2] == "assignment") {
    expect("GET");
    const auto a = service_.assignment(p[1]);
    if (!a) throw NotFoundError("client '" + p[1] + "' has no assignment yet");
    return {200, json{{"round", a->round}, {"level", a->level}}};
  }
  if (p.size() == 3 && p[0] == "clients" && p[2] == "feedback") {
    expect("POST");
    json j = parse_body(body);
    if (j.is_object() && !j.contains("client_id")) j["client_id"] = p[1];
    const auto id = service_.submit_feedback(p[1], j.get<FeedbackRecord>());
    return {201, json{{"case_id", id}}};
  }
  if (p.size() == 2 && p[0] == "interview") {
    expect("GET");
    return {200, service_.session_json(p[1])};
  }
  if (p.size() == 3 && p[0] == "interview" && p[2] == "message") {
    expect("POST");
    json j = parse_body(body);
    const auto step = service_.send_message(p[1], get_field<std::string>(j, "text"));
    return {200, json{{"agent_message", step.agent_message}, {"done", step.done}}};
  }
  if (p.size() == 2 && p[0] == "rounds" && p[1] == "plan") {
    expect("POST");
    json j = parse_body(body);
    std::optional<int> round;
    if (j.contains("round")) round = get_field<int>(j, "round");
    return {200, json(service_.plan_round(round))};
  }
  if (p.size() == 1 && p[0] == "metrics") {
    expect("GET");
    return {200, service_.metrics()};
  }
  throw NotFoundError("no route for " + std::string(path));
}

void bind(httplib::Server& server, ApiRouter& router) {
  auto handler = [&router](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = router.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Put(any, handler);
  server.Delete(any, handler);
  // The browser client is served from another origin.
  server.Options(any, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
}

void run_server(const ServerConfig& config) {
  PlanningService service(config);
  ApiRouter router(service);
  httplib::Server server;
  bind(server, router);
  if (!server.bind_to_port(config.host, config.port)) {
    throw std::runtime_error("cannot listen on " + config.host + ":" + std::to_string(config.port));
  }
  std::cerr << "qplan listening on " << config.host << ":" << config.port << "\n";
  server.listen_after_bind();
}

}  // namespace qplan
