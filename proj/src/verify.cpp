#include "pulltab/verify.hpp"

#include <deque>
#include <sstream>

#include "pulltab/canon.hpp"
#include "pulltab/linear.hpp"
#include "pulltab/generators.hpp"
#include "pulltab/pulltab_step.hpp"
#include "pulltab/represented.hpp"
#include "pulltab/rewrite.hpp"
#include "pulltab/strategies.hpp"

namespace pulltab {

void DecorationMonitor::begin_session() {
  label_seen_.clear();
  id_seen_.clear();
}

void DecorationMonitor::observe(const Graph& g) {
  ++states_;
  for (const auto& [id, node] : g.nodes()) {
    std::string label = node.label_key();
    auto [lit, lfresh] = label_seen_.emplace(id, label);
    if (!lfresh && lit->second != label) {
      ++violations_;
      if (notes_.size() < 8)
        notes_.push_back("node " + to_string(id) + " relabeled " + lit->second +
                         " -> " + label);
    }
    if (node.choice) {
      auto [cit, cfresh] = id_seen_.emplace(id, *node.choice);
      if (!cfresh && cit->second != *node.choice) {
        ++violations_;
        if (notes_.size() < 8)
          notes_.push_back("node " + to_string(id) + " changed identifier " +
                           to_string(cit->second) + " -> " + to_string(*node.choice));
      }
    }
  }
}

std::string SuiteResult::to_string() const {
  std::ostringstream out;
  out << (ok() ? "PASS" : "FAIL") << " " << name << ": " << passed << "/" << cases
      << " passed";
  if (inconclusive) out << ", " << inconclusive << " inconclusive";
  if (failed) out << ", " << failed << " FAILED";
  return out.str();
}

namespace {

struct SuiteContext {
  Allocator alloc;
  Program program;
  std::mt19937_64 rng;
  DecorationMonitor* monitor;

  SuiteContext(std::uint64_t seed, DecorationMonitor* mon)
      : program(Program::load(base_program_text(), alloc)), rng(seed), monitor(mon) {
    if (monitor) monitor->begin_session();
  }

  void observe(const Graph& g) {
    if (monitor) monitor->observe(g);
  }
};

// Generates until the predicate-selected material exists or retries run out.
template <typename Make, typename Accept>
std::optional<Graph> generate_where(const GraphGenOptions& opts, Make&& make,
                                    Accept&& accept, int retries = 200) {
  for (int i = 0; i < retries; ++i) {
    Graph g = make(opts);
    if (accept(g)) return g;
  }
  return std::nullopt;
}

std::vector<StepPlan> nonchoice_steps(const Program& p, const Graph& g) {
  std::vector<StepPlan> out;
  for (const StepPlan& plan : applicable_steps(p, g))
    if (!plan.rule->is_choice_rule()) out.push_back(plan);
  return out;
}

// Pull-tab positions: (target, index) with a choice successor and a
// non-choice target.
std::vector<std::pair<NodeId, int>> pulltab_positions(const Graph& g) {
  std::vector<std::pair<NodeId, int>> out;
  for (NodeId id : preorder(g)) {
    const Node& n = g.node(id);
    if (n.is_choice()) continue;
    for (int i = 0; i < static_cast<int>(n.succs.size()); ++i)
      if (g.node(n.succs[static_cast<std::size_t>(i)]).is_choice()) out.emplace_back(id, i);
  }
  return out;
}

std::set<std::string> value_key_set(const Outcome& o) {
  std::set<std::string> keys;
  for (const Graph& v : o.values) keys.insert(canonicalize(v));
  return keys;
}

// Independent ground truth for small expressions: breadth-first closure of
// single rewrite steps (no pull-tabs); values are collected from every
// interleaving. Fresh identifiers keep every such computation consistent.
std::optional<std::set<std::string>> oracle_value_set(const Program& p, const Graph& g,
                                                      Allocator& alloc,
                                                      std::size_t state_cap) {
  std::set<std::string> seen{canonicalize(g)};
  std::set<std::string> values;
  std::deque<Graph> queue{g};
  while (!queue.empty()) {
    Graph cur = std::move(queue.front());
    queue.pop_front();
    std::vector<StepPlan> plans = applicable_steps(p, cur);
    if (is_value(cur)) values.insert(canonicalize(cur));
    for (const StepPlan& plan : plans) {
      Graph next = rewrite_step(cur, plan.at, *plan.rule, alloc);
      std::string key = canonicalize(next);
      if (!seen.insert(key).second) continue;
      if (seen.size() > state_cap) return std::nullopt;  // too big to settle
      queue.push_back(std::move(next));
    }
  }
  return values;
}

}  // namespace

SuiteResult verify_parallel_moves(int cases, std::uint64_t seed, DecorationMonitor* monitor) {
  SuiteContext ctx(seed, monitor);
  SuiteResult result;
  result.name = "parallel-moves";
  GraphGenOptions opts;
  opts.max_depth = 4;
  for (int i = 0; i < cases; ++i) {
    ++result.cases;
    auto picked = generate_where(
        opts, [&](const GraphGenOptions& o) { return random_graph(ctx.program, ctx.alloc, ctx.rng, o); },
        [&](const Graph& g) {
          std::vector<StepPlan> plans = applicable_steps(ctx.program, g);
          std::set<NodeId> nodes;
          for (const StepPlan& plan : plans) nodes.insert(plan.at);
          return nodes.size() >= 2;
        });
    if (!picked) {
      ++result.failed;
      result.notes.push_back("could not generate a two-redex instance");
      continue;
    }
    const Graph& g = *picked;
    ctx.observe(g);
    std::vector<StepPlan> plans = applicable_steps(ctx.program, g);
    // Two plans at distinct nodes, chosen at random.
    StepPlan s1, s2;
    for (;;) {
      s1 = plans[std::uniform_int_distribution<std::size_t>(0, plans.size() - 1)(ctx.rng)];
      s2 = plans[std::uniform_int_distribution<std::size_t>(0, plans.size() - 1)(ctx.rng)];
      if (s1.at != s2.at) break;
    }
    auto apply_if_present = [&](Graph state, const StepPlan& plan) {
      if (!state.contains(plan.at)) return state;  // erased: reflexive closure
      return rewrite_step(state, plan.at, *plan.rule, ctx.alloc);
    };
    try {
      Graph a = rewrite_step(g, s1.at, *s1.rule, ctx.alloc);
      Graph b = rewrite_step(g, s2.at, *s2.rule, ctx.alloc);
      ctx.observe(a);
      ctx.observe(b);
      Graph ab = apply_if_present(a, s2);
      Graph ba = apply_if_present(b, s1);
      ctx.observe(ab);
      ctx.observe(ba);
      if (graphs_equal(ab, ba)) {
        ++result.passed;
      } else {
        ++result.failed;
        if (result.notes.size() < 5)
          result.notes.push_back("mismatch on " + print_linear(g));
      }
    } catch (const Error& e) {
      ++result.failed;
      if (result.notes.size() < 5) result.notes.push_back(e.what());
    }
  }
  return result;
}

SuiteResult verify_pulltab_invariance(int cases, std::uint64_t seed,
                                      DecorationMonitor* monitor) {
  SuiteContext ctx(seed, monitor);
  SuiteResult result;
  result.name = "pulltab-invariance";
  GraphGenOptions opts;
  opts.max_depth = 4;
  opts.choice_p = 0.35;
  opts.max_choices = 4;
  for (int i = 0; i < cases; ++i) {
    ++result.cases;
    auto picked = generate_where(
        opts, [&](const GraphGenOptions& o) { return random_graph(ctx.program, ctx.alloc, ctx.rng, o); },
        [&](const Graph& g) { return !pulltab_positions(g).empty(); });
    if (!picked) {
      ++result.failed;
      result.notes.push_back("could not generate a pull-tab instance");
      continue;
    }
    const Graph& g = *picked;
    ctx.observe(g);
    auto positions = pulltab_positions(g);
    auto [target, index] =
        positions[std::uniform_int_distribution<std::size_t>(0, positions.size() - 1)(ctx.rng)];
    try {
      Graph g2 = pull_tab(g, target, index, ctx.alloc);
      ctx.observe(g2);
      if (check_pulltab_invariance(g, target, index, ctx.alloc)) {
        ++result.passed;
      } else {
        ++result.failed;
        if (result.notes.size() < 5)
          result.notes.push_back("represented set changed on " + print_linear(g));
      }
    } catch (const Error& e) {
      ++result.failed;
      if (result.notes.size() < 5) result.notes.push_back(e.what());
    }
  }
  return result;
}

SuiteResult verify_nonchoice_invariance(int cases, std::uint64_t seed,
                                        DecorationMonitor* monitor) {
  SuiteContext ctx(seed, monitor);
  SuiteResult result;
  result.name = "nonchoice-invariance";
  GraphGenOptions opts;
  opts.max_depth = 4;
  opts.choice_p = 0.25;
  opts.max_choices = 3;
  for (int i = 0; i < cases; ++i) {
    ++result.cases;
    auto picked = generate_where(
        opts, [&](const GraphGenOptions& o) { return random_graph(ctx.program, ctx.alloc, ctx.rng, o); },
        [&](const Graph& g) { return !nonchoice_steps(ctx.program, g).empty(); });
    if (!picked) {
      ++result.failed;
      result.notes.push_back("could not generate a non-choice step instance");
      continue;
    }
    const Graph& g = *picked;
    ctx.observe(g);
    auto steps = nonchoice_steps(ctx.program, g);
    const StepPlan& plan =
        steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(ctx.rng)];
    try {
      Graph g2 = rewrite_step(g, plan.at, *plan.rule, ctx.alloc);
      ctx.observe(g2);
      switch (check_nonchoice_invariance(ctx.program, g, plan, ctx.alloc)) {
        case CheckStatus::Holds:
          ++result.passed;
          break;
        case CheckStatus::Inconclusive:
          ++result.inconclusive;
          break;
        case CheckStatus::Fails:
          ++result.failed;
          if (result.notes.size() < 5)
            result.notes.push_back("invariance failed on " + print_linear(g));
          break;
      }
    } catch (const Error& e) {
      ++result.failed;
      if (result.notes.size() < 5) result.notes.push_back(e.what());
    }
  }
  return result;
}

SuiteResult verify_theorem_equivalence(int cases, std::uint64_t seed,
                                       DecorationMonitor* monitor) {
  SuiteResult result;
  result.name = "theorem-equivalence";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    ++result.cases;
    Allocator alloc;
    if (monitor) monitor->begin_session();
    std::mt19937_64 case_rng(rng());
    auto [program, entry] = random_program(alloc, case_rng);
    StrategyConfig cfg;
    cfg.max_steps = 5000;
    cfg.keep_traces = true;
    if (monitor) cfg.observer = [&](const Graph& g) { monitor->observe(g); };

    bool case_ok = true;
    std::string note;
    std::optional<std::set<std::string>> reference;
    for (StrategyKind kind : {StrategyKind::Backtrack, StrategyKind::Copy,
                              StrategyKind::Bubble, StrategyKind::PullTab}) {
      cfg.kind = kind;
      Outcome outcome = run(program, entry, cfg, alloc);
      if (outcome.exhausted) {
        case_ok = false;
        note = to_string(kind) + " exhausted its budget";
        break;
      }
      if (kind == StrategyKind::PullTab) {
        for (const auto& trace : outcome.traces) {
          if (!check_consistency(trace)) {
            case_ok = false;
            note = "inconsistent pulltab trace";
          }
        }
      }
      std::set<std::string> keys = value_key_set(outcome);
      if (!reference) {
        reference = keys;
      } else if (keys != *reference) {
        case_ok = false;
        note = "value sets differ (backtrack vs " + to_string(kind) + ")";
        break;
      }
    }
    if (case_ok && reference) {
      // Cross-check against the rewriting oracle when it stays small.
      auto oracle = oracle_value_set(program, entry, alloc, 20000);
      if (oracle && *oracle != *reference) {
        case_ok = false;
        note = "strategies disagree with the rewriting oracle";
      }
    }
    if (case_ok) {
      ++result.passed;
    } else {
      ++result.failed;
      if (result.notes.size() < 5) result.notes.push_back(note);
    }
  }
  return result;
}

}  // namespace pulltab
