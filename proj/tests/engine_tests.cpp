#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pulltab/canon.hpp"
#include "pulltab/linear.hpp"
#include "pulltab/pulltab_step.hpp"
#include "pulltab/verify.hpp"
#include "support.hpp"

using namespace pulltab;
using namespace testsupport;

TEST_CASE("rewrite_step: coin rewrites to a never-before-seen identifier") {
  Ctx ctx = base_ctx();
  Graph g = ctx.parse("coin");
  RulePtr coin_rule = ctx.program.rules_of("coin").front();
  std::uint64_t issued_before = ctx.alloc.choices_issued();
  Graph out = rewrite_step(g, g.root(), *coin_rule, ctx.alloc);
  validate(out, true);
  const Node& root = out.node(out.root());
  REQUIRE(root.is_choice());
  CHECK(root.choice->value > issued_before);  // fresh in the whole session
  CHECK(print_linear(out) == "?_0(0, 1)");
}

TEST_CASE("rewrite_step: choice rules and plain rules") {
  Ctx ctx = base_ctx();

  Graph g = ctx.parse("?_a(0, 1)");
  Graph left = rewrite_step(g, g.root(), *ctx.program.choice_rule(1), ctx.alloc);
  CHECK(print_linear(left) == "0");
  Graph right = rewrite_step(g, g.root(), *ctx.program.choice_rule(2), ctx.alloc);
  CHECK(print_linear(right) == "1");

  Graph f = ctx.parse("flip(0)");
  HeadResult hr = head_step(ctx.program, f, f.root());
  REQUIRE(hr.kind == HeadResult::Kind::Needs);
  Graph out = rewrite_step(f, hr.plan->at, *hr.plan->rule, ctx.alloc);
  CHECK(print_linear(out) == "1");

  // Mismatch is a dispatch bug, not a result.
  RulePtr flip0;
  for (const RulePtr& r : ctx.program.rules_of("flip"))
    if (r->display.find("flip 0") != std::string::npos) flip0 = r;
  Graph f1 = ctx.parse("flip(1)");
  CHECK_THROWS_AS(rewrite_step(f1, f1.root(), *flip0, ctx.alloc), Error);
}

TEST_CASE("head_step: needed argument, needed pull, exempt failure") {
  Ctx ctx = base_ctx();

  // The choice argument must first reach head normal form: step at coin.
  Graph g1 = ctx.parse("flip(coin)");
  HeadResult h1 = head_step(ctx.program, g1, g1.root());
  REQUIRE(h1.kind == HeadResult::Kind::Needs);
  CHECK(h1.plan->kind == StepKind::Rewrite);
  CHECK(h1.plan->at == find_node(g1, "coin"));

  Graph g2 = ctx.parse("flip(?_a(0, 1))");
  HeadResult h2 = head_step(ctx.program, g2, g2.root());
  REQUIRE(h2.kind == HeadResult::Kind::Needs);
  CHECK(h2.plan->kind == StepKind::PullTab);
  CHECK(h2.plan->at == g2.root());
  CHECK(h2.plan->source_index == 0);
  CHECK(h2.plan->source == find_node(g2, "?"));

  Graph g3 = ctx.parse("flip((,)(0, 0))");
  CHECK(head_step(ctx.program, g3, g3.root()).kind == HeadResult::Kind::Failure);

  Graph g4 = ctx.parse("0");
  CHECK(head_step(ctx.program, g4, g4.root()).kind == HeadResult::Kind::Value);
  Graph g5 = ctx.parse("?_a(0, 1)");
  CHECK(head_step(ctx.program, g5, g5.root()).kind == HeadResult::Kind::ChoiceAtRoot);
}

TEST_CASE("head_step: pull target is the choice's predecessor on the path") {
  Ctx ctx = base_ctx();
  // half dispatches at depth two; the s-node, not half, is the pull target.
  Graph g = ctx.parse("half(s(?_a(z, s(z))))");
  HeadResult hr = head_step(ctx.program, g, g.root());
  REQUIRE(hr.kind == HeadResult::Kind::Needs);
  CHECK(hr.plan->kind == StepKind::PullTab);
  CHECK(hr.plan->at == find_node(g, "s"));
  CHECK(hr.plan->source == find_node(g, "?"));
}

TEST_CASE("call-time choice: rewriting main never duplicates the coin") {
  Ctx ctx(std::string(base_program_text()) +
          "main = (flip x, flip x) where x = coin\n");
  Graph g = ctx.entry_main();
  const Node& root = g.node(g.root());
  CHECK(root.succs[0] != root.succs[1]);
  NodeId shared = g.node(root.succs[0]).succs[0];
  CHECK(g.node(root.succs[1]).succs[0] == shared);
  CHECK(g.node(shared).symbol->name == "coin");

  // After the coin step both flips still point at one node, now the choice.
  Graph g2 = rewrite_step(g, shared, *ctx.program.rules_of("coin").front(), ctx.alloc);
  const Node& root2 = g2.node(g2.root());
  CHECK(g2.node(root2.succs[0]).succs[0] == g2.node(root2.succs[1]).succs[0]);
  CHECK(g2.node(g2.node(root2.succs[0]).succs[0]).is_choice());
}

TEST_CASE("pull_tab: textbook example with shared spine nodes") {
  Signature sig;
  Allocator alloc;
  Graph g = parse_linear("Mul(Add(?_a(0, 1), n:2), 3)", sig, alloc);
  NodeId add = find_node(g, "Add");
  Graph out = pull_tab(g, add, 0, alloc);
  Graph expected = parse_linear("Mul(?_a(Add(0, n:2), Add(1, n)), 3)", sig, alloc);
  CHECK(graphs_equal(out, expected));
  // The 2-node is shared between the strands, not copied.
  NodeId two = find_node(out, "2");
  int indeg = 0;
  for (const auto& [id, node] : out.nodes())
    for (NodeId s : node.succs)
      if (s == two) ++indeg;
  CHECK(indeg == 2);
}

TEST_CASE("pull_tab: the Fig. 3 step keeps the identifier on both choices") {
  Ctx ctx = base_ctx();
  Graph g = ctx.parse("(,)(f1:flip(c:?_a(0, 1)), f2:flip(c))");
  NodeId f1 = g.node(g.root()).succs[0];
  Graph out = pull_tab(g, f1, 0, ctx.alloc);
  Graph expected =
      ctx.parse("(,)(?_a(flip(n1:0), flip(n2:1)), flip(?_a(n1, n2)))");
  CHECK(graphs_equal(out, expected));

  // Both reachable choice nodes carry the same identifier.
  std::set<std::uint64_t> ids;
  for (const auto& [id, node] : out.nodes())
    if (node.choice) ids.insert(node.choice->value);
  CHECK(ids.size() == 1);
}

TEST_CASE("pull_tab: unary predecessor and error cases") {
  Signature sig;
  Allocator alloc;
  Graph g = parse_linear("not(?_a(T, F))", sig, alloc);
  Graph out = pull_tab(g, g.root(), 0, alloc);
  Graph expected = parse_linear("?_a(not(T), not(F))", sig, alloc);
  CHECK(graphs_equal(out, expected));

  Graph nested = parse_linear("?_a(?_b(T, F), F)", sig, alloc);
  CHECK_THROWS_AS(pull_tab(nested, nested.root(), 0, alloc), GraphError);  // choice target
  Graph plain = parse_linear("not(T)", sig, alloc);
  CHECK_THROWS_AS(pull_tab(plain, plain.root(), 0, alloc), GraphError);  // not a choice
}

TEST_CASE("pull_tab: node economy and identifier conservation") {
  Ctx ctx = base_ctx();
  std::mt19937_64 rng(31);
  GraphGenOptions opts;
  opts.max_depth = 4;
  opts.choice_p = 0.35;
  int tested = 0;
  while (tested < 120) {
    Graph g = random_graph(ctx.program, ctx.alloc, rng, opts);
    std::vector<std::pair<NodeId, int>> positions;
    for (NodeId id : preorder(g)) {
      const Node& n = g.node(id);
      if (n.is_choice()) continue;
      for (int i = 0; i < static_cast<int>(n.succs.size()); ++i)
        if (g.node(n.succs[static_cast<std::size_t>(i)]).is_choice())
          positions.emplace_back(id, i);
    }
    if (positions.empty()) continue;
    ++tested;
    auto [target, index] =
        positions[std::uniform_int_distribution<std::size_t>(0, positions.size() - 1)(rng)];
    NodeId source = g.node(target).succs[static_cast<std::size_t>(index)];

    std::uint64_t before = ctx.alloc.nodes_issued();
    Graph out = pull_tab(g, target, index, ctx.alloc);
    validate(out);
    CHECK(ctx.alloc.nodes_issued() - before == 3);  // exactly three fresh nodes
    std::size_t bound = g.size() + 3 - (out.contains(source) ? 0 : 1);
    CHECK(out.size() <= bound);

    // No new identifier appears through a pull-tab.
    std::set<std::uint64_t> ids_before, ids_after;
    for (const auto& [id, node] : g.nodes())
      if (node.choice) ids_before.insert(node.choice->value);
    for (const auto& [id, node] : out.nodes())
      if (node.choice) ids_after.insert(node.choice->value);
    for (std::uint64_t id : ids_after) CHECK(ids_before.count(id) == 1);
  }
}

TEST_CASE("decoration immutability across random step sequences") {
  Ctx ctx = base_ctx();
  std::mt19937_64 rng(77);
  GraphGenOptions opts;
  opts.max_depth = 4;
  opts.choice_p = 0.3;
  DecorationMonitor monitor;
  for (int i = 0; i < 60; ++i) {
    Graph g = random_graph(ctx.program, ctx.alloc, rng, opts);
    monitor.observe(g);
    for (int step = 0; step < 6; ++step) {
      std::vector<StepPlan> plans = applicable_steps(ctx.program, g);
      std::vector<std::pair<NodeId, int>> pulls;
      for (NodeId id : preorder(g)) {
        const Node& n = g.node(id);
        if (n.is_choice()) continue;
        for (int k = 0; k < static_cast<int>(n.succs.size()); ++k)
          if (g.node(n.succs[static_cast<std::size_t>(k)]).is_choice())
            pulls.emplace_back(id, k);
      }
      if (plans.empty() && pulls.empty()) break;
      std::size_t total = plans.size() + pulls.size();
      std::size_t pick = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
      if (pick < plans.size()) {
        g = rewrite_step(g, plans[pick].at, *plans[pick].rule, ctx.alloc);
      } else {
        auto [t, k] = pulls[pick - plans.size()];
        g = pull_tab(g, t, k, ctx.alloc);
      }
      monitor.observe(g);
    }
  }
  CHECK(monitor.states() > 60);
  CHECK(monitor.violations() == 0);
}
