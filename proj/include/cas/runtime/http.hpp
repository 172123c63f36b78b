#pragma once

#include <memory>
#include <string>
#include <thread>

#include "cas/runtime/engine.hpp"
#include "cas/runtime/scenario.hpp"

namespace httplib {
class Server;
}

namespace cas::runtime {

// Text-bodied HTTP front end over an Engine:
//   POST /cdl?name=N               body: CDL document
//   POST /context/events           body: `at=T assert ...` lines
//   GET  /situations?at=T
//   GET  /consistency?at=T
//   GET  /explain/{name}?at=T&bindings=v=ind,v=ind
//   GET  /services
//   POST /goals/{id}/invoke?at=T&principal=P   body: payload lines
//   GET  /trace/{id}
// A missing `at` means the latest event time. Failures answer 4xx with an
// `X-Cas-Error` header holding the error code and the message as body.
class HttpServer {
 public:
  explicit HttpServer(Engine& engine);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks an ephemeral port. Returns the bound port; throws
  // BindFailure.
  int bind(const std::string& host, int port);
  // Serves on a background thread until stop().
  void start();
  // Serves on the calling thread.
  void listen();
  void stop();

 private:
  Engine& engine_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// Drives a running server with the scenario's preamble, events and probes and
// prints the same transcript as replay(). Errors keep the server's code.
std::string replay_http(const Scenario& s, const std::string& host, int port);

}  // namespace cas::runtime
