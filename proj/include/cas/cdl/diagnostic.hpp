#pragma once

#include <string>
#include <vector>

#include "cas/cdl/ast.hpp"

namespace cas::cdl {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;  // e.g. "UnknownClass", "TypeMismatch"
  std::string message;
  Span span;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// "name:line:col: error[Code]: message"
std::string format_diagnostic(const Diagnostic& d, std::string_view source_name);

}  // namespace cas::cdl
