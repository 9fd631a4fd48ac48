// Command-line driver: evaluate expressions of a program under one of the
// four strategies, check programs, export DOT, and run the property suites.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pulltab/canon.hpp"
#include "pulltab/dot.hpp"
#include "pulltab/generators.hpp"
#include "pulltab/linear.hpp"
#include "pulltab/program.hpp"
#include "pulltab/represented.hpp"
#include "pulltab/rewrite.hpp"
#include "pulltab/strategies.hpp"
#include "pulltab/verify.hpp"

namespace {

using namespace pulltab;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Graph entry_from_main(const Program& p, Allocator& alloc) {
  RulePtr m = p.main_rule();
  if (!m) throw Error("program defines no nullary 'main'; pass -e EXPR");
  Graph g;
  NodeId id = alloc.fresh_node();
  Node n;
  n.symbol = m->op;
  g.put(id, std::move(n));
  g.set_root(id);
  return rewrite_step(g, id, *m, alloc);
}

struct EvalArgs {
  std::string program_file;
  std::string expr;
  std::string strategy;
  std::uint64_t max_steps = 10000;
  bool all = false;
  std::uint64_t first = 0;
  bool unsound = false;
  bool no_hnf = false;
  bool trace = false;
  bool stats = false;
  std::string dot_file;
  bool represented = false;
};

int cmd_eval(const EvalArgs& args) {
  Allocator alloc;
  Program program = Program::load(slurp(args.program_file), alloc);

  Graph entry;
  if (!args.expr.empty()) {
    Signature sig = program.signature();  // shares the interned symbols
    ParseOptions opts;
    opts.allow_undeclared = false;
    opts.require_ground = true;
    entry = parse_linear(args.expr, sig, alloc, opts);
  } else {
    entry = entry_from_main(program, alloc);
  }

  if (!args.dot_file.empty()) {
    std::ofstream out(args.dot_file);
    if (!out) throw Error("cannot write '" + args.dot_file + "'");
    out << dot_export(entry);
  }

  if (args.represented) {
    for (const Graph& g : represented_set(entry)) std::cout << print_linear(g) << "\n";
    return 0;
  }

  StrategyConfig cfg;
  auto kind = strategy_from_name(args.strategy);
  if (!kind) throw Error("unknown strategy '" + args.strategy + "'");
  cfg.kind = *kind;
  cfg.max_steps = args.max_steps;
  if (args.first > 0) cfg.max_values = args.first;
  cfg.consistency = !args.unsound;
  cfg.hnf_before_pull = !args.no_hnf;
  cfg.keep_traces = args.trace;

  Outcome outcome = run(program, entry, cfg, alloc);
  for (const Graph& v : outcome.values) std::cout << print_linear(v) << "\n";
  if (args.trace) {
    for (std::size_t i = 0; i < outcome.traces.size(); ++i) {
      std::cout << "# strand " << i << "\n";
      for (const Step& s : outcome.traces[i]) std::cout << step_to_string(s) << "\n";
    }
  }
  if (args.stats) std::cout << outcome.stats.to_string();
  if (outcome.exhausted && args.all) return 2;
  return 0;
}

int cmd_check(const std::string& program_file) {
  Allocator alloc;
  ParsedProgram parsed = parse_program(slurp(program_file), alloc);
  ValidationReport report = validate_lois(parsed, alloc);
  if (!report.ok()) {
    std::cout << report.to_string();
    std::cout << "invalid: " << report.issues.size() << " violation(s)\n";
    return 1;
  }
  int ops = 0, ctors = 0;
  for (const SymbolPtr& sym : parsed.signature.all()) {
    if (sym->kind == SymbolKind::Operation) ++ops;
    if (sym->kind == SymbolKind::Constructor) ++ctors;
  }
  std::cout << "ok: " << parsed.rules.size() << " rule(s), " << ops << " operation(s), "
            << ctors << " constructor(s)\n";
  return 0;
}

int cmd_verify(const std::string& lemma, int cases, std::uint64_t seed) {
  DecorationMonitor monitor;
  std::vector<SuiteResult> results;
  auto want = [&](const std::string& name) { return lemma.empty() || lemma == name; };
  if (want("parallel-moves"))
    results.push_back(verify_parallel_moves(cases > 0 ? cases : 500, seed, &monitor));
  if (want("pulltab"))
    results.push_back(verify_pulltab_invariance(cases > 0 ? cases : 300, seed, &monitor));
  if (want("nonchoice"))
    results.push_back(verify_nonchoice_invariance(cases > 0 ? cases : 300, seed, &monitor));
  if (want("theorem"))
    results.push_back(verify_theorem_equivalence(cases > 0 ? cases : 100, seed, &monitor));

  bool ok = true;
  for (const SuiteResult& r : results) {
    std::cout << r.to_string() << "\n";
    for (const std::string& note : r.notes) std::cout << "  note: " << note << "\n";
    ok = ok && r.ok();
  }
  std::cout << (monitor.violations() == 0 ? "PASS" : "FAIL")
            << " decoration-immutability: " << monitor.states() << " states, "
            << monitor.violations() << " violation(s)\n";
  ok = ok && monitor.violations() == 0;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"term-graph rewriting engine for functional-logic programs"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate an expression");
  eval->add_option("program", eval_args.program_file, "program file")->required();
  eval->add_option("-e,--expr", eval_args.expr, "entry expression in linear notation");
  eval->add_option("--strategy", eval_args.strategy, "evaluation strategy")
      ->required()
      ->check(CLI::IsMember({"backtrack", "copy", "bubble", "pulltab"}));
  eval->add_option("--max-steps", eval_args.max_steps, "global step budget");
  eval->add_flag("--all", eval_args.all, "require the complete value set");
  eval->add_option("--first", eval_args.first, "stop after K values");
  eval->add_flag("--unsound", eval_args.unsound, "disable the consistency ledger (pulltab)");
  eval->add_flag("--no-hnf-before-pull", eval_args.no_hnf,
                 "pull choices without probing an alternative first");
  eval->add_flag("--trace", eval_args.trace, "print per-strand step traces");
  eval->add_flag("--stats", eval_args.stats, "print run statistics");
  eval->add_option("--dot", eval_args.dot_file, "write the entry graph as DOT");
  eval->add_flag("--represented-set", eval_args.represented,
                 "print the represented set of the entry and exit");

  std::string check_file;
  CLI::App* check = app.add_subcommand("check", "parse and validate a program");
  check->add_option("program", check_file, "program file")->required();

  std::string lemma;
  int cases = 0;
  std::uint64_t seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--lemma", lemma, "restrict to one suite")
      ->check(CLI::IsMember({"parallel-moves", "pulltab", "nonchoice", "theorem"}));
  verify->add_option("--cases", cases, "cases per suite (0 = suite default)");
  verify->add_option("--seed", seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  }

  try {
    if (eval->parsed()) return cmd_eval(eval_args);
    if (check->parsed()) return cmd_check(check_file);
    if (verify->parsed()) return cmd_verify(lemma, cases, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
