#include "pulltab/strategies.hpp"

#include <array>
#include <deque>
#include <sstream>

#include "pulltab/canon.hpp"
#include "pulltab/dominator.hpp"
#include "pulltab/pulltab_step.hpp"

namespace pulltab {

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Backtrack: return "backtrack";
    case StrategyKind::Copy: return "copy";
    case StrategyKind::Bubble: return "bubble";
    case StrategyKind::PullTab: return "pulltab";
  }
  return "?";
}

std::optional<StrategyKind> strategy_from_name(const std::string& name) {
  if (name == "backtrack") return StrategyKind::Backtrack;
  if (name == "copy") return StrategyKind::Copy;
  if (name == "bubble") return StrategyKind::Bubble;
  if (name == "pulltab") return StrategyKind::PullTab;
  return std::nullopt;
}

std::string RunStats::to_string() const {
  std::ostringstream out;
  out << "steps=" << steps << "\n"
      << "rewrite_steps=" << rewrite_steps << "\n"
      << "pulltab_steps=" << pulltab_steps << "\n"
      << "nodes_allocated=" << nodes_allocated << "\n"
      << "nodes_cloned=" << nodes_cloned << "\n"
      << "strands_forked=" << strands_forked << "\n"
      << "strands_failed=" << strands_failed << "\n"
      << "leaves=" << leaves << "\n";
  return out.str();
}

bool check_consistency(std::span<const Step> trace) {
  std::map<ChoiceId, int> decided;
  for (const Step& s : trace) {
    if (!s.is_choice_step()) continue;
    auto [it, fresh] = decided.emplace(*s.choice, s.rule->choice_alt);
    if (!fresh && it->second != s.rule->choice_alt) return false;
  }
  return true;
}

namespace {

struct Strand {
  Graph g;
  Ledger ledger;
  std::vector<Step> trace;
  // Backtracking defers the sibling reduction until the strand is resumed.
  std::optional<std::pair<NodeId, int>> pending_reduce;
};

enum class ProbeResult { Ok, Fail, Exhausted };

struct Engine {
  const Program& p;
  const StrategyConfig& cfg;
  Allocator& alloc;

  std::uint64_t budget;
  RunStats stats;
  std::uint64_t failures = 0;
  bool exhausted = false;
  std::map<std::string, Graph> values;  // canonical key -> representative
  std::vector<std::vector<Step>> traces;

  Engine(const Program& prog, const StrategyConfig& config, Allocator& a)
      : p(prog), cfg(config), alloc(a), budget(config.max_steps) {}

  bool budget_left() const { return budget > 0; }
  bool value_cap_hit() const {
    return cfg.max_values && values.size() >= *cfg.max_values;
  }

  void observe(const Graph& g) {
    if (cfg.observer) cfg.observer(g);
  }

  void charge() {
    --budget;
    ++stats.steps;
  }

  void finish_value(Strand& s) {
    ++stats.leaves;
    values.emplace(canonicalize(s.g), s.g);
    if (cfg.keep_traces) traces.push_back(s.trace);
  }

  void finish_failure(Strand& s) {
    ++stats.leaves;
    ++failures;
    ++stats.strands_failed;
    if (cfg.keep_traces) traces.push_back(s.trace);
  }

  void apply_rewrite(Strand& s, const StepPlan& plan) {
    Step st;
    st.kind = StepKind::Rewrite;
    st.node = plan.at;
    st.rule = plan.rule;
    if (plan.rule->is_choice_rule()) st.choice = s.g.node(plan.at).choice;
    std::uint64_t before = alloc.nodes_issued();
    s.g = rewrite_step(s.g, plan.at, *plan.rule, alloc);
    stats.nodes_allocated += alloc.nodes_issued() - before;
    ++stats.rewrite_steps;
    charge();
    s.trace.push_back(st);
    observe(s.g);
  }

  // A choice step: reduce `choice_node` by rule C1 or C2.
  void reduce(Strand& s, NodeId choice_node, int alt) {
    StepPlan plan;
    plan.kind = StepKind::Rewrite;
    plan.at = choice_node;
    plan.rule = p.choice_rule(alt);
    apply_rewrite(s, plan);
  }

  void apply_pull(Strand& s, const StepPlan& plan) {
    Step st;
    st.kind = StepKind::PullTab;
    st.node = plan.at;
    st.choice = s.g.node(plan.source).choice;
    std::uint64_t before = alloc.nodes_issued();
    s.g = pull_tab(s.g, plan.at, plan.source_index, alloc);
    std::uint64_t fresh = alloc.nodes_issued() - before;
    if (fresh != 3)
      throw Error("pull-tab allocated " + std::to_string(fresh) + " nodes");
    stats.nodes_allocated += fresh;
    stats.nodes_cloned += 1;  // one predecessor of the choice is cloned
    ++stats.pulltab_steps;
    charge();
    s.trace.push_back(st);
    observe(s.g);
  }

  // ---- backtracking ----------------------------------------------------

  void run_backtrack(Graph g0) {
    std::vector<Strand> stack;
    stack.push_back(Strand{std::move(g0), {}, {}, std::nullopt});
    while (!stack.empty() && !value_cap_hit()) {
      Strand s = std::move(stack.back());
      stack.pop_back();
      if (s.pending_reduce) {
        if (!budget_left()) {
          exhausted = true;
          return;
        }
        reduce(s, s.pending_reduce->first, s.pending_reduce->second);
        s.pending_reduce.reset();
      }
      for (;;) {
        auto f = next_focus(s.g);
        if (!f) {
          finish_value(s);
          break;
        }
        if (!budget_left()) {
          exhausted = true;
          return;
        }
        NodeId needed_choice{};
        bool have_choice = false;
        if (s.g.node(f->node).is_choice()) {
          needed_choice = f->node;
          have_choice = true;
        } else {
          HeadResult hr = head_step(p, s.g, f->node);
          if (hr.kind == HeadResult::Kind::Failure) {
            finish_failure(s);
            break;
          }
          const StepPlan& plan = *hr.plan;
          if (plan.kind == StepKind::Rewrite) {
            apply_rewrite(s, plan);
            continue;
          }
          needed_choice = plan.source;
          have_choice = true;
        }
        if (have_choice) {
          Strand other;
          other.g = s.g;
          other.trace = s.trace;
          other.pending_reduce = {{needed_choice, 2}};
          stack.push_back(std::move(other));
          ++stats.strands_forked;
          reduce(s, needed_choice, 1);
        }
      }
    }
  }

  // ---- shared breadth-first driver for copy / bubble / pulltab ----------

  void run_queue(Graph g0) {
    std::deque<Strand> queue;
    queue.push_back(Strand{std::move(g0), {}, {}, std::nullopt});
    while (!queue.empty() && !value_cap_hit()) {
      if (!budget_left()) {
        exhausted = true;
        return;
      }
      Strand s = std::move(queue.front());
      queue.pop_front();
      StrandOutcome r = strand_action(s, queue);
      switch (r) {
        case StrandOutcome::Continue:
          queue.push_back(std::move(s));
          break;
        case StrandOutcome::Finished:
        case StrandOutcome::Forked:
          break;
        case StrandOutcome::OutOfBudget:
          exhausted = true;
          return;
      }
    }
  }

  enum class StrandOutcome { Continue, Finished, Forked, OutOfBudget };

  StrandOutcome strand_action(Strand& s, std::deque<Strand>& queue) {
    auto f = next_focus(s.g);
    if (!f) {
      finish_value(s);
      return StrandOutcome::Finished;
    }
    if (s.g.node(f->node).is_choice()) {
      if (f->at_root) return root_choice(s, f->node, queue);
      StepPlan plan;
      plan.kind = StepKind::PullTab;
      plan.at = f->parent;
      plan.source_index = f->index;
      plan.source = f->node;
      return needed_choice(s, plan, queue);
    }
    HeadResult hr = head_step(p, s.g, f->node);
    if (hr.kind == HeadResult::Kind::Failure) {
      finish_failure(s);
      return StrandOutcome::Finished;
    }
    const StepPlan& plan = *hr.plan;
    if (plan.kind == StepKind::Rewrite) {
      apply_rewrite(s, plan);
      return StrandOutcome::Continue;
    }
    return needed_choice(s, plan, queue);
  }

  // A choice that reached the root: split into strands (no context to
  // clone); pulltab consults and extends the ledger instead when it can.
  StrandOutcome root_choice(Strand& s, NodeId c, std::deque<Strand>& queue) {
    if (cfg.kind == StrategyKind::PullTab && cfg.consistency) {
      ChoiceId id = *s.g.node(c).choice;
      auto it = s.ledger.find(id);
      if (it != s.ledger.end()) {
        if (!budget_left()) return StrandOutcome::OutOfBudget;
        reduce(s, c, it->second);
        return StrandOutcome::Continue;
      }
    }
    fork_strands(s, c, queue);
    return StrandOutcome::Forked;
  }

  void fork_strands(Strand& s, NodeId c, std::deque<Strand>& queue) {
    ChoiceId id = *s.g.node(c).choice;
    for (int alt = 1; alt <= 2; ++alt) {
      Strand t;
      t.g = s.g;
      t.ledger = s.ledger;
      t.trace = s.trace;
      if (cfg.kind == StrategyKind::PullTab && cfg.consistency) t.ledger[id] = alt;
      if (!budget_left()) {
        exhausted = true;
        return;
      }
      reduce(t, c, alt);
      queue.push_back(std::move(t));
    }
    ++stats.strands_forked;
  }

  StrandOutcome needed_choice(Strand& s, const StepPlan& plan, std::deque<Strand>& queue) {
    switch (cfg.kind) {
      case StrategyKind::Copy:
        return split_copy(s, plan.source, queue);
      case StrategyKind::Bubble:
        return bubble_step(s, plan.source);
      case StrategyKind::PullTab:
        return pulltab_choice(s, plan);
      case StrategyKind::Backtrack:
        break;  // handled by run_backtrack
    }
    throw Error("unreachable strategy dispatch");
  }

  // Copying: both alternatives continue in full clones of the context
  // (fresh node ids for everything; choice identifiers are preserved).
  StrandOutcome split_copy(Strand& s, NodeId c, std::deque<Strand>& queue) {
    for (int alt = 1; alt <= 2; ++alt) {
      Strand t;
      t.g = s.g;
      t.ledger = s.ledger;
      t.trace = s.trace;
      if (!budget_left()) {
        exhausted = true;
        return StrandOutcome::OutOfBudget;
      }
      reduce(t, c, alt);
      std::uint64_t before = alloc.nodes_issued();
      t.g = clone_graph(t.g, alloc);
      std::uint64_t fresh = alloc.nodes_issued() - before;
      stats.nodes_allocated += fresh;
      stats.nodes_cloned += fresh;
      observe(t.g);
      queue.push_back(std::move(t));
    }
    ++stats.strands_forked;
    return StrandOutcome::Forked;
  }

  // Bubbling: hoist the choice to its immediate proper dominator, cloning
  // the region between them (dominator inclusive, choice exclusive).
  StrandOutcome bubble_step(Strand& s, NodeId c) {
    if (!budget_left()) return StrandOutcome::OutOfBudget;
    NodeId d = immediate_dominator(s.g, c);
    // Region: nodes on some d-to-c path, minus c itself.
    std::set<NodeId> below_d = reachable_from(s.g, d);
    std::set<NodeId> region;
    for (NodeId x : below_d)
      if (x != c && reachable_from(s.g, x).count(c)) region.insert(x);

    const Node& cn = s.g.node(c);
    std::uint64_t before = alloc.nodes_issued();
    Graph h;
    std::array<std::map<NodeId, NodeId>, 2> maps;
    for (int j = 0; j < 2; ++j) {
      for (NodeId x : region) maps[static_cast<std::size_t>(j)][x] = alloc.fresh_node();
      for (NodeId x : region) {
        Node copy = s.g.node(x);
        for (NodeId& succ : copy.succs) {
          if (succ == c)
            succ = cn.succs[static_cast<std::size_t>(j)];
          else if (region.count(succ))
            succ = maps[static_cast<std::size_t>(j)].at(succ);
        }
        h.put(maps[static_cast<std::size_t>(j)].at(x), std::move(copy));
      }
    }
    Node hoisted;
    hoisted.symbol = cn.symbol;
    hoisted.succs = {maps[0].at(d), maps[1].at(d)};
    hoisted.choice = cn.choice;
    NodeId q = alloc.fresh_node();
    h.put(q, std::move(hoisted));
    h.set_root(q);

    Step st;
    st.kind = StepKind::PullTab;
    st.node = d;
    st.choice = cn.choice;
    s.g = replace_at(s.g, d, h);
    std::uint64_t fresh = alloc.nodes_issued() - before;
    stats.nodes_allocated += fresh;
    stats.nodes_cloned += fresh - 1;  // all but the hoisted choice node
    ++stats.pulltab_steps;
    charge();
    s.trace.push_back(st);
    observe(s.g);
    return StrandOutcome::Continue;
  }

  // Pull-tabbing proper.
  StrandOutcome pulltab_choice(Strand& s, const StepPlan& plan) {
    NodeId c = plan.source;
    ChoiceId id = *s.g.node(c).choice;
    if (cfg.consistency) {
      auto it = s.ledger.find(id);
      if (it != s.ledger.end()) {
        // Already decided: reduce in place, no fork, no cloning.
        if (!budget_left()) return StrandOutcome::OutOfBudget;
        reduce(s, c, it->second);
        return StrandOutcome::Continue;
      }
      if (cfg.hnf_before_pull) {
        switch (probe_alternative(s, c)) {
          case ProbeResult::Fail: {
            // The left alternative cannot produce a value: commit the
            // sibling and reduce without pulling.
            if (!budget_left()) return StrandOutcome::OutOfBudget;
            s.ledger[id] = 2;
            reduce(s, c, 2);
            return StrandOutcome::Continue;
          }
          case ProbeResult::Exhausted:
            return StrandOutcome::OutOfBudget;
          case ProbeResult::Ok:
            break;
        }
      }
    }
    if (!budget_left()) return StrandOutcome::OutOfBudget;
    apply_pull(s, plan);
    return StrandOutcome::Continue;
  }

  // Evaluates the left alternative of `choice_node` to head normal form
  // within the strand. Nested needed choices follow the same pull-tab
  // policy, so the probe may itself pull or reduce inside the alternative.
  ProbeResult probe_alternative(Strand& s, NodeId choice_node) {
    for (;;) {
      NodeId t = s.g.node(choice_node).succs[0];
      const Node& tn = s.g.node(t);
      if (tn.is_ctor()) return ProbeResult::Ok;
      if (tn.is_choice()) return ProbeResult::Ok;  // never pull into a choice target
      if (!budget_left()) return ProbeResult::Exhausted;
      HeadResult hr = head_step(p, s.g, t);
      if (hr.kind == HeadResult::Kind::Failure) return ProbeResult::Fail;
      const StepPlan& plan = *hr.plan;
      if (plan.kind == StepKind::Rewrite) {
        apply_rewrite(s, plan);
        continue;
      }
      NodeId inner = plan.source;
      ChoiceId inner_id = *s.g.node(inner).choice;
      auto it = s.ledger.find(inner_id);
      if (it != s.ledger.end()) {
        reduce(s, inner, it->second);
        continue;
      }
      switch (probe_alternative(s, inner)) {
        case ProbeResult::Fail:
          s.ledger[inner_id] = 2;
          if (!budget_left()) return ProbeResult::Exhausted;
          reduce(s, inner, 2);
          continue;
        case ProbeResult::Exhausted:
          return ProbeResult::Exhausted;
        case ProbeResult::Ok:
          if (!budget_left()) return ProbeResult::Exhausted;
          apply_pull(s, plan);
          continue;
      }
    }
  }
};

}  // namespace

Outcome run(const Program& p, const Graph& g, const StrategyConfig& cfg, Allocator& alloc) {
  if (!cfg.consistency && cfg.kind != StrategyKind::PullTab)
    throw Error("consistency can be disabled only for the pulltab strategy");
  validate(g, /*require_ground=*/true);

  Engine engine(p, cfg, alloc);
  engine.observe(g);
  if (cfg.kind == StrategyKind::Backtrack)
    engine.run_backtrack(g);
  else
    engine.run_queue(g);

  Outcome out;
  out.failures = engine.failures;
  out.exhausted = engine.exhausted;
  out.stats = engine.stats;
  out.traces = std::move(engine.traces);
  for (auto& [key, graph] : engine.values) out.values.push_back(std::move(graph));
  return out;
}

Outcome run_backtrack(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc) {
  cfg.kind = StrategyKind::Backtrack;
  return run(p, g, cfg, alloc);
}
Outcome run_copy(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc) {
  cfg.kind = StrategyKind::Copy;
  return run(p, g, cfg, alloc);
}
Outcome run_bubble(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc) {
  cfg.kind = StrategyKind::Bubble;
  return run(p, g, cfg, alloc);
}
Outcome run_pulltab(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc) {
  cfg.kind = StrategyKind::PullTab;
  return run(p, g, cfg, alloc);
}

}  // namespace pulltab
