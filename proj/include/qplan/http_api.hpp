#pragma once

// REST routing over PlanningService. ApiRouter is transport-free so it can be
// exercised directly; bind() mounts it on an httplib server.

#include <string>
#include <string_view>

#include "qplan/service.hpp"

namespace httplib {
class Server;
}

namespace qplan {

struct ApiResponse {
  int status = 200;
  json body;
};

class ApiRouter {
 public:
  explicit ApiRouter(PlanningService& service) : service_(service) {}

  // Never throws; errors map to 404 / 405 / 409 / 422 / 500 with an
  // {"error", "field"?} body.
  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

 private:
  ApiResponse dispatch(std::string_view method, std::string_view path, const std::string& body);

  PlanningService& service_;
};

void bind(httplib::Server& server, ApiRouter& router);

// Blocks until the server stops.
void run_server(const ServerConfig& config);

}  // namespace qplan
