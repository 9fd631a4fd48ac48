#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pulltab/canon.hpp"
#include "pulltab/dot.hpp"
#include "pulltab/linear.hpp"
#include "support.hpp"

using namespace pulltab;
using namespace testsupport;

namespace {

Graph adhoc(const std::string& text, Signature& sig, Allocator& alloc) {
  return parse_linear(text, sig, alloc);
}

}  // namespace

TEST_CASE("allocator hands out monotonically fresh ids") {
  Allocator alloc;
  NodeId a = alloc.fresh_node();
  NodeId b = alloc.fresh_node();
  CHECK(a < b);
  ChoiceId c = alloc.fresh_choice();
  ChoiceId d = alloc.fresh_choice();
  CHECK(c != d);
}

TEST_CASE("parse_linear: running-example graph with sharing") {
  Ctx ctx = base_ctx();
  Graph g = ctx.parse("(,)(n1:flip(n2:coin), n3:flip(n2))");
  validate(g, true);
  CHECK(g.size() == 4);
  NodeId coin = find_node(g, "coin");
  const Node& root = g.node(g.root());
  CHECK(root.symbol->name == "(,)");
  NodeId f1 = root.succs[0];
  NodeId f2 = root.succs[1];
  CHECK(f1 != f2);
  CHECK(g.node(f1).succs[0] == coin);
  CHECK(g.node(f2).succs[0] == coin);
}

TEST_CASE("parse_linear: single node and shared pinned choice") {
  Signature sig;
  Allocator alloc;
  Graph coin = adhoc("coin", sig, alloc);
  CHECK(coin.size() == 1);
  CHECK(coin.node(coin.root()).succs.empty());

  Graph shared = adhoc("(,)(n:?_a(0, 1), n)", sig, alloc);
  CHECK(shared.size() == 4);
  const Node& root = shared.node(shared.root());
  CHECK(root.succs[0] == root.succs[1]);
  CHECK(shared.node(root.succs[0]).is_choice());
}

TEST_CASE("parse_linear: errors") {
  Signature sig;
  Allocator alloc;
  CHECK_THROWS_AS(adhoc("f(a)  f", sig, alloc), ParseError);           // trailing input
  CHECK_THROWS_AS(adhoc("g(f(a), f(a, b))", sig, alloc), ParseError);  // arity mismatch
  CHECK_THROWS_AS(adhoc("(,)(n:a, n:b)", sig, alloc), ParseError);     // name rebound
  CHECK_THROWS_AS(adhoc("n:f(n)", sig, alloc), ParseError);            // cycle
  Signature strict;
  Allocator alloc2;
  ParseOptions opts;
  opts.allow_undeclared = false;
  CHECK_THROWS_AS(parse_linear("mystery", strict, alloc2, opts), ParseError);
}

TEST_CASE("print_linear: names only where sharing demands them") {
  Ctx ctx = base_ctx();
  Graph g = ctx.parse("(,)(n1:flip(n2:coin), n3:flip(n2))");
  CHECK(print_linear(g) == "(,)(flip(n2:coin), flip(n2))");

  Signature sig;
  Allocator alloc;
  CHECK(print_linear(adhoc("coin", sig, alloc)) == "coin");
}

TEST_CASE("print/parse round-trip is isomorphic on random graphs") {
  Ctx ctx = base_ctx();
  std::mt19937_64 rng(2024);
  GraphGenOptions opts;
  opts.max_depth = 4;
  opts.choice_p = 0.3;
  for (int i = 0; i < 200; ++i) {
    Graph g = random_graph(ctx.program, ctx.alloc, rng, opts);
    std::string text = print_linear(g);
    Signature sig = ctx.program.signature();
    Graph back = parse_linear(text, sig, ctx.alloc);
    CAPTURE(text);
    CHECK(graphs_equal(g, back));
  }
}

TEST_CASE("canonicalize: equality modulo node and identifier renaming") {
  Signature sig;
  Allocator alloc;
  Graph a = adhoc("f(n:a, n)", sig, alloc);
  Graph b = adhoc("f(m:a, m)", sig, alloc);
  CHECK(canonicalize(a) == canonicalize(b));
  CHECK(graphs_equal(a, b));

  // Sharing is observable: two distinct a-nodes differ from one shared.
  Graph c = adhoc("f(a, a)", sig, alloc);
  CHECK(canonicalize(c) != canonicalize(a));
  CHECK_FALSE(graphs_equal(c, a));

  // Choice identifiers compare up to bijective renaming.
  Graph d = adhoc("?_a(0, 1)", sig, alloc);
  Graph e = adhoc("?_b(0, 1)", sig, alloc);
  CHECK(graphs_equal(d, e));

  // ...but the sameness pattern matters.
  Graph f = adhoc("(,)(?_a(0, 1), ?_a(0, 1))", sig, alloc);
  Graph h = adhoc("(,)(?_a(0, 1), ?_b(0, 1))", sig, alloc);
  CHECK_FALSE(graphs_equal(f, h));
}

TEST_CASE("canonicalize is deterministic and cycle-free only") {
  Signature sig;
  Allocator alloc;
  Graph g = adhoc("f(n:a, g(n))", sig, alloc);
  CHECK(canonicalize(g) == canonicalize(g));
}

TEST_CASE("graphs_equal is an equivalence relation") {
  Ctx ctx = base_ctx();
  std::mt19937_64 rng(7);
  GraphGenOptions opts;
  opts.max_depth = 3;
  for (int i = 0; i < 40; ++i) {
    Graph g = random_graph(ctx.program, ctx.alloc, rng, opts);
    Graph c1 = clone_graph(g, ctx.alloc);
    Graph c2 = clone_graph(c1, ctx.alloc);
    Graph other = random_graph(ctx.program, ctx.alloc, rng, opts);
    CHECK(graphs_equal(g, g));
    CHECK(graphs_equal(g, c1));
    CHECK(graphs_equal(c1, g));
    // transitivity through two clones
    CHECK(graphs_equal(g, c2));
    CHECK(graphs_equal(g, other) == graphs_equal(other, g));
  }
}

TEST_CASE("replace_at: redirection, sharing, and garbage collection") {
  Signature sig;
  Allocator alloc;

  Graph g1 = adhoc("f(n:a)", sig, alloc);
  Graph b = adhoc("b", sig, alloc);
  Graph r1 = replace_at(g1, find_node(g1, "a"), b);
  CHECK(print_linear(r1) == "f(b)");

  // Both edges into the shared node follow the redirection.
  Graph g2 = adhoc("(,)(n:a, n)", sig, alloc);
  Graph c = adhoc("c", sig, alloc);
  Graph r2 = replace_at(g2, find_node(g2, "a"), c);
  CHECK(print_linear(r2) == "(,)(n1:c, n1)");

  // Replacing the root by one alternative garbage-collects the other.
  Graph g3 = adhoc("?_x(n:a, b)", sig, alloc);
  NodeId a_node = find_node(g3, "a");
  Graph r3 = replace_at(g3, g3.root(), subgraph(g3, a_node));
  CHECK(print_linear(r3) == "a");
  CHECK(r3.root() == a_node);
  // Reachability oracle: exactly the nodes reachable from the new root.
  CHECK(r3.size() == 1);
  validate(r3);
}

TEST_CASE("replace_at never mutates its input") {
  Signature sig;
  Allocator alloc;
  Graph g = adhoc("f(n:a, g(n))", sig, alloc);
  std::string before = canonicalize(g);
  Graph h = adhoc("h(b)", sig, alloc);
  Graph out = replace_at(g, find_node(g, "a"), h);
  CHECK(canonicalize(g) == before);
  CHECK_FALSE(graphs_equal(g, out));
  CHECK_THROWS_AS(replace_at(g, NodeId{999999}, h), GraphError);
}

TEST_CASE("validate rejects malformed graphs") {
  Signature sig;
  Allocator alloc;
  Graph g = adhoc("f(a, b)", sig, alloc);

  Graph bad_arity = g;
  Node n = bad_arity.node(bad_arity.root());
  n.succs.pop_back();
  bad_arity.put(bad_arity.root(), n);
  CHECK_THROWS_AS(validate(bad_arity), GraphError);

  Graph unreachable = g;
  Node extra;
  extra.symbol = sig.ensure("zzz", 0);
  unreachable.put(alloc.fresh_node(), extra);
  CHECK_THROWS_AS(validate(unreachable), GraphError);

  // Decoration domain: a choice label demands an identifier.
  Graph tweaked = g;
  Node q;
  q.symbol = sig.choice_symbol();
  q.succs = g.node(g.root()).succs;
  tweaked.put(tweaked.root(), q);
  CHECK_THROWS_AS(validate(tweaked), GraphError);
}

TEST_CASE("dot export: examples and grammar oracle") {
  Ctx ctx = base_ctx();
  Signature sig;
  Allocator alloc;

  Graph coin = adhoc("coin", sig, alloc);
  std::string single = dot_export(coin);
  CHECK(dot_syntax_ok(single));
  CHECK(single.find("label=\"coin\"") != std::string::npos);

  Graph fig1 = ctx.parse("(,)(flip(n2:coin), flip(n2))");
  std::string dot = dot_export(fig1);
  CHECK(dot_syntax_ok(dot));
  // 4 nodes, 4 edges, the coin node referenced twice.
  CHECK(std::count(dot.begin(), dot.end(), '[') == 8);
  std::size_t arrows = 0;
  for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 2))
    ++arrows;
  CHECK(arrows == 4);

  std::mt19937_64 rng(99);
  GraphGenOptions opts;
  opts.choice_p = 0.3;
  for (int i = 0; i < 50; ++i) {
    Graph g = random_graph(ctx.program, ctx.alloc, rng, opts);
    CHECK(dot_syntax_ok(dot_export(g)));
  }
}

TEST_CASE("node_at_path and subgraph") {
  Signature sig;
  Allocator alloc;
  Graph g = adhoc("f(g(a), b)", sig, alloc);
  NodeId a = node_at_path(g, g.root(), {0, 0});
  CHECK(g.node(a).symbol->name == "a");
  Graph sub = subgraph(g, node_at_path(g, g.root(), {0}));
  CHECK(print_linear(sub) == "g(a)");
  CHECK_THROWS_AS(node_at_path(g, g.root(), {5}), GraphError);
}
