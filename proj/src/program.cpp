#include "pulltab/program.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pulltab {
namespace {

struct Tok {
  enum Kind { Ident, QMark, LPar, RPar, Comma, Eq, Pipe, Slash, Semi, End } kind;
  std::string text;
};

struct LineLexer {
  std::string line;
  std::size_t pos = 0;
  int lineno;

  LineLexer(std::string l, int no) : line(std::move(l)), lineno(no) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  Tok next() {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) return {Tok::End, ""};
    char c = line[pos];
    switch (c) {
      case '?': ++pos; return {Tok::QMark, "?"};
      case '(': ++pos; return {Tok::LPar, "("};
      case ')': ++pos; return {Tok::RPar, ")"};
      case ',': ++pos; return {Tok::Comma, ","};
      case '=': ++pos; return {Tok::Eq, "="};
      case '|': ++pos; return {Tok::Pipe, "|"};
      case '/': ++pos; return {Tok::Slash, "/"};
      case ';': ++pos; return {Tok::Semi, ";"};
      default: break;
    }
    if (!ident_char(c)) fail(std::string("unexpected character '") + c + "'");
    std::size_t start = pos;
    while (pos < line.size() && ident_char(line[pos])) ++pos;
    return {Tok::Ident, line.substr(start, pos - start)};
  }

  Tok peeked;
  bool has_peek = false;

  Tok peek() {
    if (!has_peek) {
      peeked = next();
      has_peek = true;
    }
    return peeked;
  }

  Tok take() {
    if (has_peek) {
      has_peek = false;
      return peeked;
    }
    return next();
  }

  Tok expect(Tok::Kind k, const std::string& what) {
    Tok t = take();
    if (t.kind != k) fail("expected " + what + (t.text.empty() ? "" : " before '" + t.text + "'"));
    return t;
  }
};

// Strips a `--` comment; respects nothing fancier (no strings in this format).
std::string strip_comment(const std::string& line) {
  auto p = line.find("--");
  return p == std::string::npos ? line : line.substr(0, p);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

// Builds one rule's lhs or rhs inside a shared node space.
struct RuleGraphBuilder {
  Signature& sig;
  Allocator& alloc;
  LineLexer& lex;
  Graph space;                              // nodes under construction
  std::map<std::string, NodeId> var_nodes;  // one node per variable name
  int anon = 0;

  RuleGraphBuilder(Signature& s, Allocator& a, LineLexer& l) : sig(s), alloc(a), lex(l) {}

  NodeId var_node(const std::string& name) {
    std::string key = name;
    if (name == "_") key = "_anon" + std::to_string(anon++);
    auto it = var_nodes.find(key);
    if (it != var_nodes.end()) return it->second;
    NodeId id = alloc.fresh_node();
    Node n;
    n.var = key;
    space.put(id, std::move(n));
    var_nodes.emplace(key, id);
    return id;
  }

  NodeId symbol_node(const SymbolPtr& sym, std::vector<NodeId> args) {
    if (static_cast<int>(args.size()) != sym->arity)
      lex.fail("arity mismatch: '" + sym->name + "' expects " + std::to_string(sym->arity) +
               " arguments, got " + std::to_string(args.size()));
    NodeId id = alloc.fresh_node();
    Node n;
    n.symbol = sym;
    n.succs = std::move(args);
    if (sym->kind == SymbolKind::Choice) n.choice = alloc.fresh_choice();
    space.put(id, std::move(n));
    return id;
  }

  // --- patterns ---

  NodeId pattern_atom() {
    Tok t = lex.take();
    if (t.kind == Tok::Ident) {
      SymbolPtr sym = sig.lookup(t.text);
      if (!sym) return var_node(t.text);
      return symbol_node(sym, {});
    }
    if (t.kind == Tok::LPar) {
      NodeId first = pattern_app();
      if (lex.peek().kind == Tok::Comma) {
        lex.take();
        NodeId second = pattern_app();
        lex.expect(Tok::RPar, "')'");
        return symbol_node(sig.pair_symbol(), {first, second});
      }
      lex.expect(Tok::RPar, "')'");
      return first;
    }
    lex.fail("expected a pattern");
  }

  NodeId pattern_app() {
    Tok t = lex.peek();
    if (t.kind == Tok::Ident) {
      SymbolPtr sym = sig.lookup(t.text);
      if (sym && sym->arity > 0) {
        lex.take();
        std::vector<NodeId> args;
        for (int i = 0; i < sym->arity; ++i) args.push_back(pattern_atom());
        return symbol_node(sym, std::move(args));
      }
    }
    return pattern_atom();
  }

  // --- right-hand sides ---

  bool at_where() {
    Tok t = lex.peek();
    return t.kind == Tok::Ident && t.text == "where";
  }

  NodeId rhs_expr() {
    NodeId left = rhs_app();
    if (lex.peek().kind == Tok::QMark) {
      lex.take();
      NodeId right = rhs_expr();
      return symbol_node(sig.choice_symbol(), {left, right});
    }
    return left;
  }

  NodeId rhs_app() {
    Tok t = lex.peek();
    if (t.kind == Tok::Ident && !at_where()) {
      SymbolPtr sym = sig.lookup(t.text);
      if (sym) {
        lex.take();
        std::vector<NodeId> args;
        for (int i = 0; i < sym->arity; ++i) args.push_back(rhs_atom());
        return symbol_node(sym, std::move(args));
      }
    }
    return rhs_atom();
  }

  NodeId rhs_atom() {
    Tok t = lex.take();
    if (t.kind == Tok::Ident) {
      if (t.text == "where") lex.fail("misplaced 'where'");
      SymbolPtr sym = sig.lookup(t.text);
      if (sym) return symbol_node(sym, {});  // nullary use; arity checked
      return var_node(t.text);
    }
    if (t.kind == Tok::LPar) {
      NodeId first = rhs_expr();
      if (lex.peek().kind == Tok::Comma) {
        lex.take();
        NodeId second = rhs_expr();
        lex.expect(Tok::RPar, "')'");
        return symbol_node(sig.pair_symbol(), {first, second});
      }
      lex.expect(Tok::RPar, "')'");
      return first;
    }
    lex.fail("expected an expression");
  }
};

struct ProgramParser {
  Allocator& alloc;
  ParsedProgram out;

  explicit ProgramParser(Allocator& a) : alloc(a) {}

  void parse_data(LineLexer& lex) {
    Tok name = lex.expect(Tok::Ident, "a type name");
    lex.expect(Tok::Eq, "'='");
    std::vector<std::string> members;
    for (;;) {
      Tok ctor = lex.expect(Tok::Ident, "a constructor name");
      int arity = 0;
      if (lex.peek().kind == Tok::Slash) {
        lex.take();
        Tok num = lex.expect(Tok::Ident, "an arity");
        try {
          arity = std::stoi(num.text);
        } catch (...) {
          lex.fail("bad arity '" + num.text + "'");
        }
      }
      out.signature.declare(ctor.text, SymbolKind::Constructor, arity);
      members.push_back(ctor.text);
      Tok sep = lex.take();
      if (sep.kind == Tok::End) break;
      if (sep.kind != Tok::Pipe) lex.fail("expected '|'");
    }
    out.signature.add_group(name.text, members);
  }

  // First pass over a rule line: declare the head operation by its
  // pattern count so later lines can reference it.
  void predeclare(LineLexer& lex) {
    Tok head = lex.take();
    if (head.kind == Tok::QMark) return;  // built in
    if (head.kind != Tok::Ident) lex.fail("expected a rule head");
    int npats = 0;
    for (;;) {
      Tok t = lex.take();
      if (t.kind == Tok::Eq) break;
      if (t.kind == Tok::End) lex.fail("missing '=' in rule");
      if (t.kind == Tok::Ident) {
        ++npats;
      } else if (t.kind == Tok::LPar) {
        int depth = 1;
        while (depth > 0) {
          Tok u = lex.take();
          if (u.kind == Tok::End) lex.fail("unbalanced '(' in pattern");
          if (u.kind == Tok::LPar) ++depth;
          if (u.kind == Tok::RPar) --depth;
        }
        ++npats;
      } else {
        lex.fail("unexpected '" + t.text + "' in pattern");
      }
    }
    SymbolPtr existing = out.signature.lookup(head.text);
    if (existing && existing->kind == SymbolKind::Constructor)
      return;  // flagged during validation
    out.signature.declare(head.text, SymbolKind::Operation, npats);
  }

  void parse_rule(LineLexer& lex, const std::string& display, int index_hint) {
    Tok head = lex.take();
    SymbolPtr op;
    if (head.kind == Tok::QMark) {
      op = out.signature.choice_symbol();
    } else {
      op = out.signature.lookup(head.text);
      if (!op) lex.fail("unknown symbol '" + head.text + "'");
    }

    Rule rule;
    rule.op = op;
    rule.index = index_hint;
    rule.origin = "line " + std::to_string(lex.lineno);
    rule.display = display;

    // Left-hand side.
    RuleGraphBuilder lhs{out.signature, alloc, lex};
    std::vector<NodeId> args;
    while (lex.peek().kind != Tok::Eq) {
      if (lex.peek().kind == Tok::End) lex.fail("missing '=' in rule");
      args.push_back(lhs.pattern_atom());
    }
    lex.expect(Tok::Eq, "'='");
    if (static_cast<int>(args.size()) != op->arity)
      lex.fail("arity mismatch: '" + op->name + "' has rules with " +
               std::to_string(op->arity) + " patterns, got " + std::to_string(args.size()));
    NodeId lhs_root = alloc.fresh_node();
    Node lhs_head;
    lhs_head.symbol = op;
    lhs_head.succs = args;
    if (op->kind == SymbolKind::Choice) lhs_head.choice = alloc.fresh_choice();
    lhs.space.put(lhs_root, std::move(lhs_head));
    lhs.space.set_root(lhs_root);
    rule.lhs = [&] {
      Graph g;
      g.set_root(lhs_root);
      for (NodeId id : reachable_from(lhs.space, lhs_root)) g.put(id, lhs.space.node(id));
      return g;
    }();
    validate(rule.lhs);

    // Right-hand side, then `where` bindings substituted in order.
    RuleGraphBuilder rhs{out.signature, alloc, lex};
    NodeId rhs_root = rhs.rhs_expr();
    std::vector<std::pair<std::string, NodeId>> bindings;
    if (rhs.at_where()) {
      lex.take();
      for (;;) {
        Tok name = lex.expect(Tok::Ident, "a binding name");
        if (out.signature.lookup(name.text))
          lex.fail("'" + name.text + "' shadows a declared symbol in where clause");
        lex.expect(Tok::Eq, "'='");
        bindings.emplace_back(name.text, rhs.rhs_expr());
        if (lex.peek().kind != Tok::Semi) break;
        lex.take();
      }
    }
    if (lex.peek().kind != Tok::End) lex.fail("trailing input after rule");

    for (const auto& [name, bound_root] : bindings) {
      auto it = rhs.var_nodes.find(name);
      if (it == rhs.var_nodes.end()) continue;  // unused binding
      NodeId var_id = it->second;
      if (bound_root == var_id) lex.fail("binding '" + name + "' refers to itself");
      if (rhs_root == var_id) rhs_root = bound_root;
      std::vector<std::pair<NodeId, Node>> rewritten;
      for (const auto& [id, node] : rhs.space.nodes()) {
        Node copy = node;
        for (NodeId& s : copy.succs)
          if (s == var_id) s = bound_root;
        rewritten.emplace_back(id, std::move(copy));
      }
      for (auto& [id, node] : rewritten) rhs.space.put(id, std::move(node));
      rhs.space.erase(var_id);
      rhs.var_nodes.erase(name);
    }

    rule.rhs = [&] {
      Graph g;
      g.set_root(rhs_root);
      for (NodeId id : reachable_from(rhs.space, rhs_root)) g.put(id, rhs.space.node(id));
      return g;
    }();
    validate(rule.rhs);

    // Every rhs variable must be bound on the left.
    std::set<std::string> lhs_vars;
    for (const auto& [id, node] : rule.lhs.nodes())
      if (node.is_var()) lhs_vars.insert(node.var);
    for (const auto& [id, node] : rule.rhs.nodes())
      if (node.is_var() && !lhs_vars.count(node.var))
        lex.fail("rhs variable '" + node.var + "' does not occur in the lhs");

    out.rules.push_back(std::make_shared<Rule>(std::move(rule)));
  }

  ParsedProgram run(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;
    {
      std::istringstream in(text);
      std::string line;
      int no = 0;
      while (std::getline(in, line)) {
        ++no;
        std::string body = strip_comment(line);
        if (!blank(body)) lines.emplace_back(no, body);
      }
    }
    // Pass 1: data declarations and operation arities.
    for (const auto& [no, body] : lines) {
      LineLexer lex(body, no);
      Tok first = lex.peek();
      if (first.kind == Tok::Ident && first.text == "data") {
        lex.take();
        parse_data(lex);
      } else {
        predeclare(lex);
      }
    }
    // Pass 2: rules.
    std::map<std::string, int> per_op_index;
    for (const auto& [no, body] : lines) {
      LineLexer lex(body, no);
      Tok first = lex.peek();
      if (first.kind == Tok::Ident && first.text == "data") continue;
      std::string head = first.kind == Tok::QMark ? "?" : first.text;
      parse_rule(lex, body, per_op_index[head]++);
    }
    return std::move(out);
  }
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

ParsedProgram parse_program(const std::string& text, Allocator& alloc) {
  ProgramParser p(alloc);
  return p.run(text);
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) out << issue.where << ": " << issue.message << "\n";
  return out.str();
}

std::pair<RulePtr, RulePtr> builtin_choice_rules(const Signature& sig, Allocator& alloc) {
  auto make = [&](int alt, const std::string& display) {
    Rule r;
    r.op = sig.choice_symbol();
    r.index = alt - 1;
    r.choice_alt = alt;
    r.origin = "builtin";
    r.display = display;
    NodeId root = alloc.fresh_node();
    NodeId vx = alloc.fresh_node();
    NodeId vy = alloc.fresh_node();
    Node head;
    head.symbol = r.op;
    head.succs = {vx, vy};
    head.choice = alloc.fresh_choice();
    Node x;
    x.var = "x";
    Node y;
    y.var = "y";
    r.lhs.put(root, std::move(head));
    r.lhs.put(vx, std::move(x));
    r.lhs.put(vy, std::move(y));
    r.lhs.set_root(root);
    NodeId rv = alloc.fresh_node();
    Node rhs_var;
    rhs_var.var = alt == 1 ? "x" : "y";
    r.rhs.put(rv, std::move(rhs_var));
    r.rhs.set_root(rv);
    return std::make_shared<Rule>(std::move(r));
  };
  return {make(1, "x ? _ = x"), make(2, "_ ? y = y")};
}

ValidationReport validate_lois(const ParsedProgram& p, Allocator& alloc) {
  ValidationReport report;
  auto issue = [&](const std::string& where, const std::string& msg) {
    report.issues.push_back({where, msg});
  };

  std::map<std::string, std::vector<RulePtr>> by_op;
  std::vector<RulePtr> choice_rules;
  for (const RulePtr& r : p.rules) {
    const std::string where = r->origin + " (" + trim(r->display) + ")";
    if (r->op->kind == SymbolKind::Constructor) {
      issue(where, "constructor '" + r->op->name + "' heads a rule");
      continue;
    }
    if (r->op->kind == SymbolKind::Choice) {
      choice_rules.push_back(r);
      continue;
    }
    by_op[r->op->name].push_back(r);

    // Constructor-based: below the root only constructors and variables.
    for (const auto& [id, node] : r->lhs.nodes()) {
      if (id == r->lhs.root()) continue;
      if (node.is_op() || node.is_choice())
        issue(where, "lhs argument contains the " +
                         std::string(node.is_choice() ? "choice symbol" : "operation '" +
                                                            node.symbol->name + "'"));
    }
    // Left-linear: one position per variable.
    std::map<NodeId, int> indeg;
    for (const auto& [id, node] : r->lhs.nodes())
      for (NodeId s : node.succs) ++indeg[s];
    for (const auto& [id, node] : r->lhs.nodes())
      if (node.is_var() && indeg[id] > 1)
        issue(where, "non-left-linear: variable '" + node.var + "' occurs " +
                         std::to_string(indeg[id]) + " times");
  }

  if (!choice_rules.empty()) {
    auto [c1, c2] = builtin_choice_rules(p.signature, alloc);
    auto variant_of = [](const RulePtr& a, const RulePtr& b) {
      // Compare lhs and rhs shapes together via canonical pattern walk.
      // The built-in rules are tiny, so a printed comparison modulo
      // variable names is enough: both lhs are ?(v,w); rhs picks one side.
      const Graph& al = a->lhs;
      const Graph& bl = b->lhs;
      if (al.node(al.root()).succs.size() != 2 || bl.node(bl.root()).succs.size() != 2)
        return false;
      const Node& ar = a->rhs.node(a->rhs.root());
      const Node& br = b->rhs.node(b->rhs.root());
      if (!ar.is_var() || !br.is_var()) return false;
      // Which lhs argument does the rhs return?
      auto side = [](const Rule& r) {
        const Graph& l = r.lhs;
        const Node& head = l.node(l.root());
        const std::string& rv = r.rhs.node(r.rhs.root()).var;
        for (std::size_t i = 0; i < head.succs.size(); ++i) {
          const Node& arg = l.node(head.succs[i]);
          if (arg.is_var() && arg.var == rv) return static_cast<int>(i);
        }
        return -1;
      };
      return side(*a) == side(*b) && side(*a) >= 0;
    };
    bool exact = choice_rules.size() == 2 &&
                 ((variant_of(choice_rules[0], c1) && variant_of(choice_rules[1], c2)) ||
                  (variant_of(choice_rules[0], c2) && variant_of(choice_rules[1], c1)));
    if (!exact)
      issue("choice rules", "'?' is built in and admits exactly its two rules; "
                            "found " + std::to_string(choice_rules.size()) +
                            " user rule(s) that do not match them");
  }

  for (const auto& [name, rules] : by_op) {
    try {
      build_tree(rules.front()->op, rules, p.signature, alloc);
    } catch (const NotInductivelySequentialError& e) {
      issue("operation " + name, e.what());
    }
  }
  return report;
}

Program Program::compile(ParsedProgram parsed, Allocator& alloc) {
  ValidationReport report = validate_lois(parsed, alloc);
  if (!report.ok()) throw ValidationError(std::move(report));

  Program prog;
  auto [c1, c2] = builtin_choice_rules(parsed.signature, alloc);
  prog.c1_ = c1;
  prog.c2_ = c2;
  std::map<std::string, std::vector<RulePtr>> by_op;
  for (const RulePtr& r : parsed.rules)
    if (r->op->kind == SymbolKind::Operation) by_op[r->op->name].push_back(r);
  for (auto& [name, rules] : by_op)
    prog.trees_[name] = build_tree(rules.front()->op, rules, parsed.signature, alloc);
  prog.rules_ = std::move(parsed.rules);
  prog.signature_ = std::move(parsed.signature);
  return prog;
}

Program Program::load(const std::string& text, Allocator& alloc) {
  return compile(parse_program(text, alloc), alloc);
}

std::vector<RulePtr> Program::rules_of(const std::string& op) const {
  if (op == "?") return {c1_, c2_};
  std::vector<RulePtr> out;
  for (const RulePtr& r : rules_)
    if (r->op->name == op) out.push_back(r);
  return out;
}

const DefTree* Program::tree(const std::string& op) const {
  auto it = trees_.find(op);
  return it == trees_.end() ? nullptr : it->second.get();
}

RulePtr Program::main_rule() const {
  for (const RulePtr& r : rules_)
    if (r->op->name == "main" && r->op->arity == 0) return r;
  return nullptr;
}

}  // namespace pulltab
