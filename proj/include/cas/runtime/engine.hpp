#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cas/adaptation/pipeline.hpp"
#include "cas/cdl/environment.hpp"
#include "cas/kb/knowledge_base.hpp"
#include "cas/registry/registry.hpp"
#include "cas/runtime/ingest.hpp"
#include "cas/situation/engine.hpp"

namespace cas::runtime {

// The standard upper ontology as CDL text.
std::string_view upper_prelude();

// Handlers backing the fixture services (currently `pharmacyDirectory`).
void register_fixture_handlers(adaptation::HandlerTable& table);

struct EngineOptions {
  IngestConfig ingest;
  bool load_prelude = true;
  bool fixture_handlers = true;
};

// Facade over store, situation program, registry and pipeline. Every public
// member is safe to call concurrently; writes are serialized.
class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  // Parses, validates and applies a document atomically: on any error
  // nothing changes. Throws ParseError or ValidationError with formatted
  // diagnostics; registration failures keep their own codes. Returns the
  // warnings.
  std::vector<cdl::Diagnostic> load(std::string_view text, const std::string& source_name);
  std::vector<cdl::Diagnostic> load_file(const std::string& path);

  // Register before loading services that name the handler.
  void add_handler(const std::string& id, adaptation::Handler handler);

  kb::FactId ingest(const ContextEvent& e);
  kb::FactId assert_fact(kb::Assertion a);

  kb::Snapshot snapshot_at(Instant t) const;
  situation::Evaluation situations_at(Instant t) const;
  situation::ActiveSituation explain(const std::string& situation,
                                     const std::map<std::string, std::string>& bindings,
                                     Instant t) const;
  std::vector<kb::Violation> consistency_at(Instant t) const;
  std::vector<registry::MatchResult> match(const std::string& goal) const;

  // Assigns the next request id ("req-N") when req.request_id is empty.
  adaptation::Ticket notify(adaptation::RequestEnvelope req, adaptation::Mode mode);
  // Sync notify, waits, records the trace.
  adaptation::Outcome invoke(const std::string& goal, const std::string& principal, Instant at,
                             adaptation::Payload payload);
  std::optional<std::string> trace(const std::string& trace_id) const;

  // Canonical CDL for services, goals and mediators.
  std::string services_cdl() const;
  // Latest event timestamp seen so far, 0 if none.
  Instant latest_time() const;

  adaptation::Context context() const;
  const kb::KnowledgeBase& store() const { return kb_; }

 private:
  mutable std::mutex mu_;
  IngestConfig ingest_;
  kb::KnowledgeBase kb_;
  cdl::Environment env_;
  std::shared_ptr<const situation::Program> program_;
  std::shared_ptr<const registry::Registry> registry_;
  std::shared_ptr<const std::map<std::string, adaptation::Adaptation>> adaptations_;
  std::shared_ptr<adaptation::HandlerTable> handlers_;
  std::map<std::string, std::string> traces_;
  std::uint64_t next_request_ = 1;
  Instant latest_ = 0;
};

}  // namespace cas::runtime
