#pragma once

// Program files: `--` line comments, `data` declarations grouping
// constructors (arity via a `/k` suffix), and rule lines
// `op pat* = rhs [where x = e {; y = e}]`. The rhs supports `?` infix
// (right-associative), pair sugar `(a, b)`, and application by
// juxtaposition. A validated program is a LOIS system: left-linear,
// constructor-based rules; `?` is the only operation with overlapping
// left-hand sides; every other operation has a definitional tree.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pulltab/deftree.hpp"
#include "pulltab/graph.hpp"
#include "pulltab/rule.hpp"

namespace pulltab {

struct ParsedProgram {
  Signature signature;
  std::vector<RulePtr> rules;  // user rules only; the choice rules are built in
};

ParsedProgram parse_program(const std::string& text, Allocator& alloc);

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

struct ValidationError : Error {
  ValidationReport report;
  explicit ValidationError(ValidationReport r)
      : Error("program is not a valid LOIS system:\n" + r.to_string()),
        report(std::move(r)) {}
};

// LOIS checks, aggregated: rule heads are operations, patterns are
// left-linear and constructor-based, `?` keeps exactly its two built-in
// rules, and every operation admits a definitional tree.
ValidationReport validate_lois(const ParsedProgram& p, Allocator& alloc);

class Program {
 public:
  // Validates and compiles definitional trees; throws ValidationError.
  static Program compile(ParsedProgram parsed, Allocator& alloc);
  static Program load(const std::string& text, Allocator& alloc);

  const Signature& signature() const { return signature_; }
  const std::vector<RulePtr>& rules() const { return rules_; }
  std::vector<RulePtr> rules_of(const std::string& op) const;
  const DefTree* tree(const std::string& op) const;

  RulePtr choice_rule(int alt) const { return alt == 1 ? c1_ : c2_; }

  // The nullary operation `main`, when defined; used as the default entry.
  RulePtr main_rule() const;

 private:
  Signature signature_;
  std::vector<RulePtr> rules_;
  std::map<std::string, std::shared_ptr<const DefTree>> trees_;
  RulePtr c1_, c2_;
};

// The two built-in choice rules over fresh nodes from `alloc`.
std::pair<RulePtr, RulePtr> builtin_choice_rules(const Signature& sig, Allocator& alloc);

}  // namespace pulltab
