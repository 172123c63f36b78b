#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cas/adaptation/payload.hpp"
#include "cas/cdl/ast.hpp"
#include "cas/kb/snapshot.hpp"
#include "cas/registry/registry.hpp"
#include "cas/situation/engine.hpp"

namespace cas::adaptation {

using Adaptation = cdl::AdaptationDecl;

struct RequestEnvelope {
  std::string request_id;
  std::string goal;
  Payload payload;
  Instant at = 0;
  std::string principal;
  bool operator==(const RequestEnvelope&) const = default;
};

// One adaptation woven into a request, with the rule that selected it.
struct Applied {
  std::string service;    // owner of the rule
  std::string situation;  // the rule's `when`
  std::string adaptation;
  cdl::JoinPoint join_point = cdl::JoinPoint::PostInvoke;
  bool operator==(const Applied&) const = default;
};

struct ResponseEnvelope {
  std::string request_id;
  std::string service;
  Payload payload;
  std::vector<Applied> applied;  // execution order
  std::string trace_id;
  bool operator==(const ResponseEnvelope&) const = default;
};

struct StepRecord {
  std::string adaptation;
  cdl::JoinPoint join_point = cdl::JoinPoint::PostInvoke;
  std::string step;  // canonical step text
  std::string before;
  std::string after;
  bool operator==(const StepRecord&) const = default;
};

struct PipelineTrace {
  std::string trace_id;
  std::string request_id;
  std::string goal;
  std::string principal;
  Instant at = 0;
  std::string snapshot_digest;
  std::vector<std::string> situations;  // formatted active situations
  std::vector<std::string> matching;    // formatted ranked matches
  std::vector<Applied> weave;
  std::vector<StepRecord> steps;
  std::string service;
  bool operator==(const PipelineTrace&) const = default;
};

// What a handler sees. Situations and adaptations are deliberately absent.
struct InvocationContext {
  const kb::Snapshot& snapshot;
  const std::string& principal;
  Instant at;
};
using Handler = std::function<Payload(const InvocationContext&, const Payload&)>;

class HandlerTable {
 public:
  // The echo handler is always present.
  HandlerTable();
  void add(const std::string& id, Handler h);  // DuplicateId
  const Handler& find(const std::string& id) const;  // UnknownHandler
  std::set<std::string> ids() const;

 private:
  std::map<std::string, Handler> handlers_;
};

// Frozen inputs of a pipeline. Shared, immutable, safe to hand to another
// thread.
struct Context {
  std::shared_ptr<const situation::Program> program;
  std::shared_ptr<const registry::Registry> registry;
  std::shared_ptr<const std::map<std::string, Adaptation>> adaptations;
  std::shared_ptr<const HandlerTable> handlers;
};

struct Identification {
  std::string service;
  situation::Evaluation evaluation;
  std::vector<registry::MatchResult> ranking;
  std::vector<Applied> selection;  // Selection adaptations woven
  std::vector<StepRecord> steps;
};

// Evaluates situations, ranks candidates, runs Selection adaptations over
// the candidate records {service, degree, hops, rank} and checks the chosen
// service's precondition. NoMatch, PreconditionUnsatisfied, UnknownGoal.
Identification identify_service(const kb::Snapshot& snapshot, const RequestEnvelope& req,
                                const Context& ctx);

struct Reconfigured {
  Handler handler;               // PreInvoke steps, raw handler, PostInvoke steps
  std::vector<Applied> applied;  // PreInvoke then PostInvoke, each in rule order
};

// `log`, when given, receives one record per executed step and must outlive
// calls to the returned handler. UnknownAdaptationId.
Reconfigured reconfigure(const std::string& service_id, const std::set<std::string>& active,
                         const Context& ctx, std::vector<StepRecord>* log = nullptr);

struct Outcome {
  ResponseEnvelope response;
  PipelineTrace trace;
  bool operator==(const Outcome&) const = default;
};

Outcome run_pipeline(const kb::Snapshot& snapshot, const RequestEnvelope& req,
                     const Context& ctx);

enum class Mode { Sync, Async };

// Resolves to the pipeline outcome or rethrows its error. Copyable; get()
// may be called from any thread.
class Ticket {
 public:
  explicit Ticket(std::shared_future<Outcome> f) : future_(std::move(f)) {}
  bool ready() const;
  const Outcome& get() const;

 private:
  std::shared_future<Outcome> future_;
};

// UnknownGoal is raised here, before a ticket exists. The snapshot must be
// the store's view at req.at.
Ticket notify(RequestEnvelope req, kb::Snapshot snapshot, Context ctx, Mode mode);

std::string format_applied(const Applied& a);
std::string format_response(const ResponseEnvelope& r);
// Sections SNAPSHOT-DIGEST, SITUATIONS, MATCHING, WEAVE, STEPS.
std::string format_trace(const PipelineTrace& t);

}  // namespace cas::adaptation
