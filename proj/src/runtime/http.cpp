#include "cas/runtime/http.hpp"

#include <charconv>
#include <fstream>

#include <fmt/core.h>
#include <httplib.h>

#include "cas/error.hpp"

namespace cas::runtime {

namespace {

constexpr const char* kText = "text/plain; charset=utf-8";
constexpr const char* kErrorHeader = "X-Cas-Error";

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownGoal:
    case Errc::UnknownService:
    case Errc::UnknownSituation:
    case Errc::NotActive:
      return 404;
    case Errc::NoMatch:
    case Errc::PreconditionUnsatisfied:
      return 409;
    default:
      return 400;
  }
}

Instant at_param(const httplib::Request& req, const Engine& engine) {
  if (!req.has_param("at")) return engine.latest_time();
  std::string s = req.get_param_value("at");
  Instant t = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), t);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || t < 0) {
    throw Error(Errc::InvalidArgument, fmt::format("invalid at '{}'", s));
  }
  return t;
}

// "v=ind,w=ind2"
std::map<std::string, std::string> parse_bindings(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string kv = text.substr(pos, comma - pos);
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
      throw Error(Errc::InvalidArgument, fmt::format("bad binding '{}'", kv));
    }
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
    pos = comma + 1;
  }
  return out;
}

std::string format_bindings(const std::map<std::string, std::string>& b) {
  std::string out;
  for (const auto& [k, v] : b) out += fmt::format("{}{}={}", out.empty() ? "" : ",", k, v);
  return out;
}

// Wraps a handler so every failure becomes a coded 4xx reply.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(f(req), kText);
    } catch (const Error& e) {
      res.status = status_for(e.code());
      res.set_header(kErrorHeader, std::string(to_string(e.code())));
      res.set_content(e.detail(), kText);
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(e.what(), kText);
    }
  };
}

}  // namespace

HttpServer::HttpServer(Engine& engine)
    : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  // SO_REUSEADDR only: the library default also sets SO_REUSEPORT, which lets
  // a second server silently share a busy port.
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  s.Post("/cdl", guarded([this](const httplib::Request& req) {
    std::string name = req.has_param("name") ? req.get_param_value("name") : "request.cdl";
    auto warnings = engine_.load(req.body, name);
    return fmt::format("loaded {} ({} warnings)\n", name, warnings.size());
  }));
  s.Post("/context/events", guarded([this](const httplib::Request& req) {
    auto events = parse_events(req.body);
    std::size_t n = 0;
    for (const auto& e : events) {
      try {
        engine_.ingest(e);
      } catch (const Error& err) {
        throw Error(err.code(), fmt::format("event {}: {}", n + 1, err.detail()));
      }
      ++n;
    }
    return fmt::format("accepted {}\n", n);
  }));
  s.Get("/situations", guarded([this](const httplib::Request& req) {
    return render_situations(engine_.situations_at(at_param(req, engine_)));
  }));
  s.Get("/consistency", guarded([this](const httplib::Request& req) {
    return render_consistency(engine_.consistency_at(at_param(req, engine_)));
  }));
  s.Get(R"(/explain/([^/]+))", guarded([this](const httplib::Request& req) {
    auto bindings = req.has_param("bindings") ? parse_bindings(req.get_param_value("bindings"))
                                              : std::map<std::string, std::string>{};
    return render_explain(engine_.explain(req.matches[1], bindings, at_param(req, engine_)));
  }));
  s.Get("/services", guarded([this](const httplib::Request&) { return engine_.services_cdl(); }));
  s.Post(R"(/goals/([^/]+)/invoke)", guarded([this](const httplib::Request& req) {
    if (!req.has_param("principal")) {
      throw Error(Errc::InvalidArgument, "missing principal parameter");
    }
    auto outcome = engine_.invoke(req.matches[1], req.get_param_value("principal"),
                                  at_param(req, engine_), adaptation::parse_payload(req.body));
    return adaptation::format_response(outcome.response);
  }));
  s.Get(R"(/trace/([^/]+))", guarded([this](const httplib::Request& req) {
    auto t = engine_.trace(req.matches[1]);
    if (!t) throw Error(Errc::InvalidArgument, fmt::format("no trace '{}'", req.matches[1].str()));
    return *t;
  }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw Error(Errc::BindFailure, fmt::format("cannot bind {}", host));
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(Errc::BindFailure, fmt::format("cannot bind {}:{}", host, port));
  }
  return port;
}

void HttpServer::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

namespace {

std::string checked(const httplib::Result& res, const std::string& what) {
  if (!res) {
    throw Error(Errc::InvalidArgument,
                fmt::format("{}: transport error {}", what, httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    Errc code = errc_from_string(res->get_header_value(kErrorHeader)).value_or(Errc::InvalidArgument);
    throw Error(code, res->body);
  }
  return res->body;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, fmt::format("cannot read '{}'", path));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string replay_http(const Scenario& s, const std::string& host, int port) {
  httplib::Client cli(host, port);
  for (const auto& f : s.preamble) {
    std::string path = resolve_path(s, f);
    std::string name = path.substr(path.find_last_of('/') + 1);
    checked(cli.Post(httplib::append_query_params("/cdl", {{"name", name}}), read_text(path), kText),
            "load " + name);
  }

  std::string out = "scenario " + s.name + "\n";
  std::size_t events = 0, probes = 0;
  std::string pending;  // consecutive events go out in one POST
  std::size_t pending_first = 0;
  auto flush = [&] {
    if (pending.empty()) return;
    try {
      checked(cli.Post("/context/events", pending, kText), "events");
    } catch (const Error& e) {
      // The server numbers events within the batch.
      std::string d = e.detail();
      std::size_t n = 0;
      if (d.rfind("event ", 0) == 0) n = std::stoul(d.substr(6));
      std::size_t colon = d.find(": ");
      throw Error(e.code(), fmt::format("event {}: {}", pending_first + (n == 0 ? 0 : n - 1),
                                        colon == std::string::npos ? d : d.substr(colon + 2)));
    }
    pending.clear();
  };

  for (const auto& step : s.steps) {
    if (const auto* e = std::get_if<ContextEvent>(&step)) {
      ++events;
      if (pending.empty()) pending_first = events;
      pending += format_event(*e) + "\n";
      continue;
    }
    flush();
    const Probe& p = std::get<Probe>(step);
    ++probes;
    out += format_probe_header(probes, p) + "\n";
    httplib::Params at{{"at", std::to_string(p.at)}};
    try {
      std::string body = std::visit(
          [&](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SituationsProbe>) {
              return checked(cli.Get(httplib::append_query_params("/situations", at)), "situations");
            } else if constexpr (std::is_same_v<T, ConsistencyProbe>) {
              return checked(cli.Get(httplib::append_query_params("/consistency", at)),
                             "consistency");
            } else if constexpr (std::is_same_v<T, ExplainProbe>) {
              httplib::Params q = at;
              if (!a.bindings.empty()) q.emplace("bindings", format_bindings(a.bindings));
              return checked(cli.Get(httplib::append_query_params("/explain/" + a.situation, q)),
                             "explain");
            } else {
              httplib::Params q = at;
              q.emplace("principal", a.principal);
              return checked(
                  cli.Post(httplib::append_query_params("/goals/" + a.goal + "/invoke", q),
                           adaptation::format_payload(a.payload), kText),
                  "invoke");
            }
          },
          p.action);
      std::size_t pos = 0;
      while (pos < body.size()) {
        std::size_t nl = body.find('\n', pos);
        if (nl == std::string::npos) nl = body.size();
        out += "  " + body.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
      }
    } catch (const Error& err) {
      throw Error(err.code(), fmt::format("probe {}: {}", probes, err.detail()));
    }
  }
  flush();
  out += fmt::format("events {}\n", events);
  return out;
}

}  // namespace cas::runtime
