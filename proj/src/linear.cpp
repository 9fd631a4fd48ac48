#include "pulltab/linear.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace pulltab {
namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError("expected '" + std::string(1, c) + "' at offset " + std::to_string(pos));
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  // An identifier, the choice symbol `?` (with optional `_tok` pin), or the
  // literal pair symbol `(,)`.
  std::string token() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input");
    char c = text[pos];
    if (c == '?') {
      ++pos;
      if (pos < text.size() && text[pos] == '_') {
        std::size_t start = pos + 1;
        std::size_t end = start;
        while (end < text.size() && ident_char(text[end])) ++end;
        if (end == start) throw ParseError("empty choice-id pin after '?_'");
        pos = end;
        return "?_" + text.substr(start, end - start);
      }
      return "?";
    }
    if (c == '(' && pos + 2 < text.size() && text[pos + 1] == ',' && text[pos + 2] == ')') {
      pos += 3;
      return "(,)";
    }
    if (!ident_char(c))
      throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                       std::to_string(pos));
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    return text.substr(start, pos - start);
  }
};

struct Parser {
  Lexer lex;
  Signature& sig;
  Allocator& alloc;
  const ParseOptions& opts;
  Graph g;
  // Node names bound in this parse; unset while the named node's arguments
  // are still being parsed, so self-references surface as cycles.
  std::map<std::string, std::optional<NodeId>> names;
  std::map<std::string, ChoiceId> pins;  // choice-id pins in this parse

  Parser(const std::string& text, Signature& s, Allocator& a, const ParseOptions& o)
      : lex(text), sig(s), alloc(a), opts(o) {}

  NodeId parse_expr() {
    std::string tok = lex.token();
    // Name binding: `name : symbol ...`.
    std::string name;
    if (lex.peek() == ':' && tok != "?" && tok.rfind("?_", 0) != 0) {
      lex.expect(':');
      name = tok;
      if (names.count(name))
        throw ParseError("node name '" + name + "' bound twice");
      names.emplace(name, std::nullopt);
      tok = lex.token();
    } else if (auto it = names.find(tok); it != names.end()) {
      // Bare reference to an already-bound node.
      if (lex.peek() == '(')
        throw ParseError("node name '" + tok + "' cannot be applied");
      if (!it->second)
        throw ParseError("cycle detected through node name '" + tok + "'");
      return *it->second;
    }

    std::optional<ChoiceId> pinned;
    bool is_choice = false;
    if (tok == "?") {
      is_choice = true;
    } else if (tok.rfind("?_", 0) == 0) {
      is_choice = true;
      std::string pin = tok.substr(2);
      auto it = pins.find(pin);
      if (it == pins.end()) it = pins.emplace(pin, alloc.fresh_choice()).first;
      pinned = it->second;
    }

    std::vector<NodeId> args;
    if (lex.accept('(')) {
      args.push_back(parse_expr());
      while (lex.accept(',')) args.push_back(parse_expr());
      lex.expect(')');
    }

    Node node;
    if (is_choice) {
      node.symbol = sig.choice_symbol();
      node.choice = pinned ? *pinned : alloc.fresh_choice();
    } else {
      SymbolPtr sym = sig.lookup(tok);
      if (!sym) {
        if (!opts.allow_undeclared)
          throw ParseError("unknown symbol '" + tok + "'");
        sym = sig.ensure(tok, static_cast<int>(args.size()));
      }
      node.symbol = sym;
    }
    if (node.symbol->arity != static_cast<int>(args.size()))
      throw ParseError("arity mismatch: '" + node.symbol->name + "' expects " +
                       std::to_string(node.symbol->arity) + " arguments, got " +
                       std::to_string(args.size()));
    node.succs = std::move(args);

    NodeId id = alloc.fresh_node();
    g.put(id, std::move(node));
    if (!name.empty()) names[name] = id;
    return id;
  }

  Graph run() {
    NodeId root = parse_expr();
    if (!lex.eof())
      throw ParseError("trailing input at offset " + std::to_string(lex.pos));
    g.set_root(root);
    validate(g, opts.require_ground);
    return std::move(g);
  }
};

}  // namespace

Graph parse_linear(const std::string& text, Signature& sig, Allocator& alloc,
                   const ParseOptions& opts) {
  Parser p(text, sig, alloc, opts);
  return p.run();
}

std::string print_linear(const Graph& g) {
  std::vector<NodeId> order = preorder(g);
  std::map<NodeId, std::size_t> ordinal;
  for (std::size_t i = 0; i < order.size(); ++i) ordinal[order[i]] = i;

  std::map<NodeId, int> indeg;
  for (const auto& [id, node] : g.nodes())
    for (NodeId s : node.succs) ++indeg[s];

  std::map<ChoiceId, std::size_t> choice_ordinal;
  for (NodeId id : order) {
    const Node& n = g.node(id);
    if (n.choice && !choice_ordinal.count(*n.choice))
      choice_ordinal.emplace(*n.choice, choice_ordinal.size());
  }

  std::set<NodeId> printed;
  std::ostringstream out;

  // Recursive emit; graphs are shallow enough in practice.
  auto emit = [&](auto&& self, NodeId id) -> void {
    if (printed.count(id)) {
      out << "n" << ordinal.at(id);
      return;
    }
    printed.insert(id);
    const Node& n = g.node(id);
    if (indeg[id] >= 2) out << "n" << ordinal.at(id) << ":";
    if (n.is_var()) {
      out << n.var;
    } else if (n.is_choice()) {
      out << "?_" << choice_ordinal.at(*n.choice);
    } else {
      out << n.symbol->name;
    }
    if (!n.succs.empty()) {
      out << "(";
      for (std::size_t i = 0; i < n.succs.size(); ++i) {
        if (i) out << ", ";
        self(self, n.succs[i]);
      }
      out << ")";
    }
  };
  emit(emit, g.root());
  return out.str();
}

}  // namespace pulltab
