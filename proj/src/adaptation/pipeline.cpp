#include "cas/adaptation/pipeline.hpp"

#include <fmt/core.h>

#include "cas/cdl/unparse.hpp"
#include "cas/error.hpp"

namespace cas::adaptation {

HandlerTable::HandlerTable() {
  handlers_.emplace(std::string(registry::kEchoHandler),
                    [](const InvocationContext&, const Payload& p) { return p; });
}

void HandlerTable::add(const std::string& id, Handler h) {
  if (!handlers_.emplace(id, std::move(h)).second) {
    throw Error(Errc::DuplicateId, fmt::format("handler '{}' is already registered", id));
  }
}

const Handler& HandlerTable::find(const std::string& id) const {
  auto it = handlers_.find(id);
  if (it == handlers_.end()) throw Error(Errc::UnknownHandler, fmt::format("no handler '{}'", id));
  return it->second;
}

std::set<std::string> HandlerTable::ids() const {
  std::set<std::string> out;
  for (const auto& [id, _] : handlers_) out.insert(id);
  return out;
}

namespace {

const Adaptation& lookup(const Context& ctx, const std::string& id) {
  auto it = ctx.adaptations->find(id);
  if (it == ctx.adaptations->end()) {
    throw Error(Errc::UnknownAdaptationId, fmt::format("unknown adaptation '{}'", id));
  }
  return it->second;
}

Payload run_adaptation(const Adaptation& a, Payload p, std::vector<StepRecord>* log) {
  for (const auto& step : a.steps) {
    std::string before = log ? payload_digest(p) : std::string();
    p = apply_transform(step, std::move(p));
    if (log) {
      log->push_back(StepRecord{a.name, a.join_point, cdl::format_step(step), std::move(before),
                                payload_digest(p)});
    }
  }
  return p;
}

}  // namespace

Identification identify_service(const kb::Snapshot& snapshot, const RequestEnvelope& req,
                                const Context& ctx) {
  const registry::CAGoal& goal = ctx.registry->goal(req.goal);
  Identification id;
  id.evaluation = situation::evaluate(snapshot, *ctx.program);
  id.ranking = ctx.registry->match_goal(goal, snapshot.ontology());
  if (id.ranking.empty()) {
    throw Error(Errc::NoMatch, fmt::format("no service matches goal '{}'", req.goal));
  }
  const std::set<std::string> active = id.evaluation.active_names();

  Payload candidates;
  for (std::size_t i = 0; i < id.ranking.size(); ++i) {
    const auto& m = id.ranking[i];
    candidates.records.push_back(Record{{"service", m.service},
                                        {"degree", std::string(registry::to_string(m.degree))},
                                        {"hops", std::int64_t{m.hops}},
                                        {"rank", static_cast<std::int64_t>(i + 1)}});
  }
  std::set<std::string> seen;
  for (const auto& m : id.ranking) {
    for (const auto& rule : ctx.registry->applicable_rules(m.service, active)) {
      for (const auto& aid : rule.apply) {
        const Adaptation& a = lookup(ctx, aid);
        if (a.join_point != cdl::JoinPoint::Selection || !seen.insert(aid).second) continue;
        candidates = run_adaptation(a, std::move(candidates), &id.steps);
        id.selection.push_back(Applied{m.service, rule.when, aid, a.join_point});
      }
    }
  }
  const std::string* chosen = nullptr;
  if (!candidates.records.empty()) {
    auto it = candidates.records.front().find("service");
    if (it != candidates.records.front().end()) chosen = std::get_if<std::string>(&it->second);
  }
  if (!chosen || !ctx.registry->services().count(*chosen)) {
    throw Error(Errc::NoMatch,
                fmt::format("selection left no candidate for goal '{}'", req.goal));
  }
  id.service = *chosen;

  const auto& service = ctx.registry->service(id.service);
  if (service.capability.precondition) {
    std::map<std::string, std::string> binding{{std::string(cdl::kPrincipalVar), req.principal}};
    if (!situation::satisfy_condition(*service.capability.precondition, binding, snapshot)) {
      throw Error(Errc::PreconditionUnsatisfied,
                  fmt::format("precondition of '{}' does not hold for '{}' at {}", id.service,
                              req.principal, req.at));
    }
  }
  return id;
}

Reconfigured reconfigure(const std::string& service_id, const std::set<std::string>& active,
                         const Context& ctx, std::vector<StepRecord>* log) {
  const auto& service = ctx.registry->service(service_id);
  std::vector<Adaptation> pre, post;
  std::vector<Applied> applied_pre, applied_post;
  for (const auto& rule : ctx.registry->applicable_rules(service_id, active)) {
    for (const auto& aid : rule.apply) {
      const Adaptation& a = lookup(ctx, aid);
      Applied entry{service_id, rule.when, aid, a.join_point};
      if (a.join_point == cdl::JoinPoint::PreInvoke) {
        pre.push_back(a);
        applied_pre.push_back(std::move(entry));
      } else if (a.join_point == cdl::JoinPoint::PostInvoke) {
        post.push_back(a);
        applied_post.push_back(std::move(entry));
      }
    }
  }
  Handler raw = ctx.handlers->find(service.handler);
  Reconfigured out;
  out.applied = std::move(applied_pre);
  out.applied.insert(out.applied.end(), applied_post.begin(), applied_post.end());
  out.handler = [pre = std::move(pre), post = std::move(post), raw = std::move(raw), log](
                    const InvocationContext& ic, const Payload& request) {
    Payload p = request;
    for (const auto& a : pre) p = run_adaptation(a, std::move(p), log);
    p = raw(ic, p);
    for (const auto& a : post) p = run_adaptation(a, std::move(p), log);
    return p;
  };
  return out;
}

Outcome run_pipeline(const kb::Snapshot& snapshot, const RequestEnvelope& req,
                     const Context& ctx) {
  Identification id = identify_service(snapshot, req, ctx);
  std::vector<StepRecord> steps = id.steps;
  Reconfigured rc = reconfigure(id.service, id.evaluation.active_names(), ctx, &steps);
  Payload result = rc.handler(InvocationContext{snapshot, req.principal, req.at}, req.payload);

  Outcome out;
  auto& r = out.response;
  r.request_id = req.request_id;
  r.service = id.service;
  r.payload = std::move(result);
  r.applied = id.selection;
  r.applied.insert(r.applied.end(), rc.applied.begin(), rc.applied.end());
  r.trace_id = "trace-" + req.request_id;

  auto& t = out.trace;
  t.trace_id = r.trace_id;
  t.request_id = req.request_id;
  t.goal = req.goal;
  t.principal = req.principal;
  t.at = req.at;
  t.snapshot_digest = snapshot.digest();
  for (const auto& a : id.evaluation.simple) t.situations.push_back(situation::format_active(a));
  for (const auto& c : id.evaluation.composites) t.situations.push_back("composite " + c);
  for (const auto& m : id.ranking) t.matching.push_back(registry::format_match(m));
  t.weave = r.applied;
  t.steps = std::move(steps);
  t.service = id.service;
  return out;
}

bool Ticket::ready() const {
  return future_.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
}

const Outcome& Ticket::get() const { return future_.get(); }

Ticket notify(RequestEnvelope req, kb::Snapshot snapshot, Context ctx, Mode mode) {
  ctx.registry->goal(req.goal);
  if (mode == Mode::Async) {
    return Ticket(std::async(std::launch::async,
                             [req = std::move(req), snapshot = std::move(snapshot),
                              ctx = std::move(ctx)] { return run_pipeline(snapshot, req, ctx); })
                      .share());
  }
  std::promise<Outcome> promise;
  try {
    promise.set_value(run_pipeline(snapshot, req, ctx));
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  return Ticket(promise.get_future().share());
}

std::string format_applied(const Applied& a) {
  return fmt::format("{} {} <- {} when {}", cdl::to_string(a.join_point), a.adaptation, a.service,
                     a.situation);
}

std::string format_response(const ResponseEnvelope& r) {
  std::string out = fmt::format("response {}\nservice {}\ntrace {}\n", r.request_id, r.service,
                                r.trace_id);
  if (r.applied.empty()) out += "applied (none)\n";
  for (const auto& a : r.applied) out += "applied " + format_applied(a) + "\n";
  out += fmt::format("payload {} records\n", r.payload.records.size());
  std::string body = format_payload(r.payload);
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t nl = body.find('\n', pos);
    out += "  " + body.substr(pos, nl - pos) + "\n";
    pos = nl + 1;
  }
  return out;
}

std::string format_trace(const PipelineTrace& t) {
  auto section = [](std::string& out, std::string_view name, const std::vector<std::string>& lines) {
    out += std::string(name) + "\n";
    if (lines.empty()) out += "  (none)\n";
    for (const auto& l : lines) out += "  " + l + "\n";
  };
  std::string out = fmt::format("TRACE {}\nrequest {} goal {} principal {} at {}\n", t.trace_id,
                                t.request_id, t.goal, t.principal, t.at);
  section(out, "SNAPSHOT-DIGEST", {t.snapshot_digest});
  section(out, "SITUATIONS", t.situations);
  std::vector<std::string> matching;
  for (std::size_t i = 0; i < t.matching.size(); ++i) {
    matching.push_back(fmt::format("{}. {}", i + 1, t.matching[i]));
  }
  section(out, "MATCHING", matching);
  std::vector<std::string> weave;
  for (const auto& a : t.weave) weave.push_back(format_applied(a));
  section(out, "WEAVE", weave);
  std::vector<std::string> steps;
  for (const auto& s : t.steps) {
    steps.push_back(fmt::format("{} {}: {} {} -> {}", cdl::to_string(s.join_point), s.adaptation,
                                s.step, s.before, s.after));
  }
  section(out, "STEPS", steps);
  section(out, "SERVICE", {t.service});
  return out;
}

}  // namespace cas::adaptation
