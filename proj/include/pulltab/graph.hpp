#pragma once

// Rooted, ordered-successor term graphs with choice-identifier decorations.
// Graphs are immutable values: every transformation returns a new Graph and
// never touches its input. Node and choice identifiers come from a single
// session-wide Allocator and are never reused.

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulltab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct NodeId {
  std::uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

// Opaque token from a countable pool; compared only for equality (ordering
// exists so ids can key maps).
struct ChoiceId {
  std::uint64_t value = 0;
  auto operator<=>(const ChoiceId&) const = default;
};

std::string to_string(NodeId n);
std::string to_string(ChoiceId c);

enum class SymbolKind { Constructor, Operation, Choice };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Constructor;
  int arity = 0;
};

using SymbolPtr = std::shared_ptr<const Symbol>;

// Registry of symbols for one program or one ad-hoc parsing context.
// `?` (the binary choice operation) and the pair constructor `(,)` are
// built in. Arity and kind are fixed per name.
class Signature {
 public:
  Signature();

  SymbolPtr choice_symbol() const { return choice_; }
  SymbolPtr pair_symbol() const { return pair_; }

  // Registers a new symbol; throws on kind/arity conflict with an
  // existing declaration.
  SymbolPtr declare(const std::string& name, SymbolKind kind, int arity);

  SymbolPtr lookup(const std::string& name) const;

  // Lookup, auto-declaring an unknown name as a constructor of the given
  // arity. Used by the ad-hoc linear-notation parser.
  SymbolPtr ensure(const std::string& name, int arity);

  // Constructor grouping from `data` declarations; used to materialize
  // exempt branches in definitional trees.
  void add_group(const std::string& group, const std::vector<std::string>& members);
  const std::vector<std::string>* group_of(const std::string& ctor) const;

  std::vector<SymbolPtr> all() const;

 private:
  std::map<std::string, SymbolPtr> symbols_;
  std::map<std::string, std::string> ctor_group_;
  std::map<std::string, std::vector<std::string>> groups_;
  SymbolPtr choice_;
  SymbolPtr pair_;
};

// Session-wide id source. Monotone counters: an id handed out once is
// never issued again, so distinct top-level expressions and replacements
// never share a fresh node.
class Allocator {
 public:
  NodeId fresh_node() { return NodeId{next_node_.fetch_add(1) + 1}; }
  ChoiceId fresh_choice() { return ChoiceId{next_choice_.fetch_add(1) + 1}; }

  std::uint64_t nodes_issued() const { return next_node_.load(); }
  std::uint64_t choices_issued() const { return next_choice_.load(); }

 private:
  std::atomic<std::uint64_t> next_node_{0};
  std::atomic<std::uint64_t> next_choice_{0};
};

// One graph node: a signature symbol or a variable name, plus ordered
// successors. Choice nodes carry their identifier decoration.
struct Node {
  SymbolPtr symbol;  // null iff variable node
  std::string var;   // variable name when symbol is null
  std::vector<NodeId> succs;
  std::optional<ChoiceId> choice;

  bool is_var() const { return symbol == nullptr; }
  bool is_choice() const { return symbol && symbol->kind == SymbolKind::Choice; }
  bool is_op() const { return symbol && symbol->kind == SymbolKind::Operation; }
  bool is_ctor() const { return symbol && symbol->kind == SymbolKind::Constructor; }

  // Stable textual key for label comparison: "name/arity" or "$var".
  std::string label_key() const;
};

class Graph {
 public:
  Graph() = default;

  NodeId root() const { return root_; }
  void set_root(NodeId r) { root_ = r; }

  bool contains(NodeId n) const { return nodes_.count(n) != 0; }
  const Node& node(NodeId n) const;

  void put(NodeId id, Node node) { nodes_[id] = std::move(node); }
  void erase(NodeId id) { nodes_.erase(id); }

  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  NodeId root_{};
  std::map<NodeId, Node> nodes_;
};

// Depth-first preorder from the root, successors in order, each node at
// first visit. Throws GraphError on a cycle.
std::vector<NodeId> preorder(const Graph& g);

// Well-formedness: successor counts match arities, every stored node is
// reachable from the root, the graph is acyclic, variable names label at
// most one node, and choice decorations live exactly on choice nodes.
// With require_ground, variable labels are rejected too.
void validate(const Graph& g, bool require_ground = false);

std::set<NodeId> reachable_from(const Graph& g, NodeId start);

// In-edge lists, in deterministic node order.
std::map<NodeId, std::vector<NodeId>> predecessors(const Graph& g);

// The graph rooted at n, restricted to nodes reachable from n.
Graph subgraph(const Graph& g, NodeId n);

// g[at <- h]: every edge into `at` is redirected to h's root (the root
// moves too when at == root). Nodes of h must be fresh or agree with g on
// shared ids. Unreachable nodes are dropped; surviving decorations are
// untouched. Throws GraphError if `at` is not in g.
Graph replace_at(const Graph& g, NodeId at, const Graph& h);

// Isomorphic copy with fresh node ids; labels and choice identifiers are
// preserved. `mapping` (optional) receives old-id -> new-id.
Graph clone_graph(const Graph& g, Allocator& alloc,
                  std::map<NodeId, NodeId>* mapping = nullptr);

// Follows successor indices from `from`; empty path yields `from`.
NodeId node_at_path(const Graph& g, NodeId from, const std::vector<int>& path);

}  // namespace pulltab
