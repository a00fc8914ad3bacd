#include "deonmf/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include <json.hpp>

#include "deonmf/errors.hpp"
#include "deonmf/grounder.hpp"

namespace deonmf {

namespace {

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

void collect_const_names(const CharPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->kind == CharKind::Const) out.insert(f->name);
  collect_const_names(f->a, out);
  collect_const_names(f->b, out);
}

void collect_const_names(const MetaPtr& m, std::set<std::string>& out) {
  if (!m) return;
  collect_const_names(m->formula, out);
  collect_const_names(m->ctx, out);
  collect_const_names(m->l, out);
  collect_const_names(m->r, out);
}

// True when the goal or any of its premises reaches a definition flagged as
// reconstructed, directly or through other definitions.
bool uses_reconstructed_def(const Theory& theory, const Goal& goal,
                            const std::vector<MetaPtr>& premises) {
  std::set<std::string> pending;
  collect_const_names(goal.formula, pending);
  for (const auto& p : premises) collect_const_names(p, pending);
  std::set<std::string> visited;
  while (!pending.empty()) {
    std::string name = *pending.begin();
    pending.erase(pending.begin());
    if (!visited.insert(name).second) continue;
    const Definition* def = theory.find_definition(name);
    if (def == nullptr) continue;
    if (def->reconstructed) return true;
    collect_const_names(def->body, pending);
  }
  return false;
}

}  // namespace

std::vector<std::pair<std::string, MetaPtr>> axioms_for_goal(
    const Theory& theory, const Goal& goal) {
  std::vector<std::pair<std::string, MetaPtr>> out;
  if (!goal.uses.has_value()) {
    out = theory.axioms;
    return out;
  }
  for (const auto& name : *goal.uses) {
    const MetaPtr* ax = theory.find_axiom(name);
    if (ax == nullptr) {
      throw std::invalid_argument("goal " + goal.name +
                                  " names unknown axiom " + name);
    }
    out.emplace_back(name, *ax);
  }
  return out;
}

std::vector<Scope> scopes_upto(const Scope& limit) {
  std::vector<Scope> out;
  for (int c = 1; c <= limit.nc; ++c) {
    for (int e = 1; e <= limit.ne; ++e) {
      for (int w = 1; w <= limit.nw; ++w) {
        out.push_back(Scope{c, e, w});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Scope& a, const Scope& b) {
    int sa = a.nc + a.ne + a.nw, sb = b.nc + b.ne + b.nw;
    if (sa != sb) return sa < sb;
    if (a.nc != b.nc) return a.nc < b.nc;
    if (a.ne != b.ne) return a.ne < b.ne;
    return a.nw < b.nw;
  });
  return out;
}

std::string verify_witness(const Theory& theory, const Interpretation& I,
                           const std::vector<MetaPtr>& premises,
                           const MetaPtr& goal, bool goal_should_hold,
                           const ConditionSet& conditions) {
  auto violations = frame_conditions_check(I.frame, conditions);
  if (!violations.empty()) {
    return "frame violates " + violations.front().condition + ": " +
           violations.front().detail;
  }
  Evaluator ev(theory, I);
  for (std::size_t i = 0; i < premises.size(); ++i) {
    if (!ev.eval_meta(premises[i])) {
      return "premise " + std::to_string(i + 1) +
             " is false in the candidate model";
    }
  }
  bool holds = ev.eval_meta(goal);
  if (holds != goal_should_hold) {
    return goal_should_hold
               ? "goal judgement is false in the candidate model"
               : "goal judgement still holds in the candidate model";
  }
  return "";
}

ScopeOutcome solve_goal_at_scope(const Theory& theory,
                                 const std::vector<MetaPtr>& premises,
                                 const MetaPtr& goal, bool refute,
                                 const Scope& scope,
                                 const CorpusOptions& opts) {
  ScopeOutcome out;
  Grounder g(theory, scope, opts.conditions, opts.cell_budget);
  for (const auto& p : premises) g.require(g.ground_meta(p));
  int goal_lit = g.ground_meta(goal);
  g.require(refute ? -goal_lit : goal_lit);

  SolverOptions sopts;
  sopts.learn = opts.learn;
  // Activity-guided decisions: reproducible under a single worker, and the
  // heavier refutation entries depend on them finishing quickly.
  sopts.deterministic = false;
  sopts.timeout_seconds = opts.timeout_seconds;
  sopts.jobs = opts.deterministic ? 1 : opts.jobs;
  SolveResult r = solve_cnf(g.num_vars(), g.clauses(), sopts);
  out.status = r.status;
  out.stats = r.stats;
  if (r.status != SolveStatus::Sat) return out;

  Interpretation I = g.decode(r.assignment);
  std::string complaint = verify_witness(theory, I, premises, goal,
                                         /*goal_should_hold=*/!refute,
                                         opts.conditions);
  if (!complaint.empty()) {
    throw std::logic_error(
        "solver witness failed independent re-evaluation (" + complaint +
        "); the encoding and the evaluator disagree");
  }
  try {
    I = canonical_form(I);
  } catch (const ScopeTooLarge&) {
    // keep the uncanonicalized witness at very large scopes
  }
  out.model = std::move(I);
  return out;
}

GoalResult run_goal(const Theory& theory, const Goal& goal,
                    const CorpusOptions& opts) {
  GoalResult res;
  res.name = goal.name;
  res.kind = goal.expect;
  res.scope = goal.scope;
  res.anchor = goal.anchor;
  double start = wall_seconds();

  auto named = axioms_for_goal(theory, goal);
  std::vector<MetaPtr> premises;
  for (auto& [n, m] : named) {
    res.premise_names.push_back(n);
    premises.push_back(m);
  }
  res.reconstructed_defs = uses_reconstructed_def(theory, goal, premises);

  auto finish = [&](std::string outcome, std::string detail) {
    res.outcome = std::move(outcome);
    res.detail = std::move(detail);
    res.seconds = wall_seconds() - start;
    return res;
  };

  try {
    switch (goal.expect) {
      case Expect::Sat:
      case Expect::Countermodel: {
        bool refute = goal.expect == Expect::Countermodel;
        res.scopes_checked.push_back(goal.scope);
        ScopeOutcome o = solve_goal_at_scope(theory, premises, goal.formula,
                                             refute, goal.scope, opts);
        res.stats.accumulate(o.stats);
        if (o.status == SolveStatus::Timeout) {
          return finish("timeout",
                        "search timed out at " + goal.scope.to_string());
        }
        if (o.status == SolveStatus::Unsat) {
          return finish("fail", refute ? "no countermodel exists at " +
                                             goal.scope.to_string()
                                       : "unsatisfiable at " +
                                             goal.scope.to_string());
        }
        res.model = o.model;
        return finish("pass", (refute ? "countermodel found at "
                                      : "model found at ") +
                                  goal.scope.to_string() +
                                  ", verified by re-evaluation");
      }
      case Expect::BoundedValid:
      case Expect::Entailed: {
        for (const Scope& s : scopes_upto(goal.scope)) {
          res.scopes_checked.push_back(s);
          ScopeOutcome o = solve_goal_at_scope(theory, premises, goal.formula,
                                               /*refute=*/true, s, opts);
          res.stats.accumulate(o.stats);
          if (o.status == SolveStatus::Timeout) {
            return finish("timeout",
                          "refutation search timed out at " + s.to_string());
          }
          if (o.status == SolveStatus::Sat) {
            res.model = o.model;
            return finish("fail",
                          "counterexample found at " + s.to_string());
          }
        }
        return finish("pass", "no counterexample at any scope up to " +
                                  goal.scope.to_string());
      }
    }
  } catch (const ScopeTooLarge& e) {
    return finish("fail", std::string("scope too large: ") + e.what());
  } catch (const UnsupportedSort& e) {
    return finish("fail", std::string("unsupported construct: ") + e.what());
  }
  return finish("fail", "unhandled goal kind");
}

CorpusReport run_corpus(const Theory& theory, const CorpusOptions& opts) {
  CorpusOptions o = opts;
  o.conditions.set("C-avpv", true);
  o.conditions.set("sem_5ab", true);
  CorpusReport report;
  report.conditions = o.conditions.active();
  report.deterministic = o.deterministic;
  for (const auto& goal : theory.goals) {
    GoalResult r = run_goal(theory, goal, o);
    if (r.outcome != "pass") report.all_passed = false;
    report.goals.push_back(std::move(r));
  }
  return report;
}

std::string CorpusReport::to_text() const {
  std::ostringstream os;
  os << "corpus report\n";
  os << "conditions:";
  for (const auto& c : conditions) os << ' ' << c;
  os << '\n';
  int passed = 0;
  for (const auto& g : goals) {
    os << "goal " << g.name << " [" << expect_to_string(g.kind) << " at "
       << g.scope.to_string() << "]";
    if (!g.premise_names.empty()) {
      os << " (premises:";
      for (const auto& p : g.premise_names) os << ' ' << p;
      os << ')';
    }
    if (g.reconstructed_defs) os << " (uses reconstructed definition)";
    os << " ... " << g.outcome;
    if (g.outcome == "pass") ++passed;
    os << " -- " << g.detail << '\n';
    if (!deterministic && g.seconds > 0) {
      std::ostringstream t;
      t.precision(3);
      t << std::fixed << g.seconds;
      os << "  time: " << t.str() << "s\n";
    }
    if (g.model.has_value()) {
      std::istringstream ms(render_model_text(*g.model));
      std::string line;
      while (std::getline(ms, line)) os << "  " << line << '\n';
    }
  }
  os << "summary: " << passed << '/' << goals.size() << " passed\n";
  return os.str();
}

std::string CorpusReport::to_json() const {
  nlohmann::ordered_json j;
  j["conditions"] = conditions;
  j["deterministic"] = deterministic;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& g : goals) {
    nlohmann::ordered_json e;
    e["name"] = g.name;
    e["kind"] = expect_to_string(g.kind);
    e["scope"] = {{"c", g.scope.nc}, {"e", g.scope.ne}, {"w", g.scope.nw}};
    if (!g.anchor.empty()) e["anchor"] = g.anchor;
    e["premises"] = g.premise_names;
    e["reconstructed_definitions"] = g.reconstructed_defs;
    e["outcome"] = g.outcome;
    e["detail"] = g.detail;
    nlohmann::ordered_json scopes = nlohmann::ordered_json::array();
    for (const Scope& s : g.scopes_checked) {
      scopes.push_back({{"c", s.nc}, {"e", s.ne}, {"w", s.nw}});
    }
    e["scopes_checked"] = scopes;
    if (g.model.has_value()) {
      e["model"] = nlohmann::ordered_json::parse(render_model_json(*g.model));
    }
    nlohmann::ordered_json st;
    st["decisions"] = g.stats.decisions;
    st["propagations"] = g.stats.propagations;
    st["conflicts"] = g.stats.conflicts;
    st["learned"] = g.stats.learned;
    e["stats"] = st;
    if (!deterministic) e["seconds"] = g.seconds;
    arr.push_back(std::move(e));
  }
  j["goals"] = std::move(arr);
  j["all_passed"] = all_passed;
  return j.dump(2);
}

}  // namespace deonmf
