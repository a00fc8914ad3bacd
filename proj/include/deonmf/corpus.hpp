#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deonmf/ast.hpp"
#include "deonmf/semantics.hpp"
#include "deonmf/solver.hpp"

namespace deonmf {

struct CorpusOptions {
  ConditionSet conditions;
  std::uint64_t cell_budget = kDefaultCellBudget;
  double timeout_seconds = 0;  // per solver call; 0 disables
  bool deterministic = false;  // stable reports: no timings, single worker
  int jobs = 1;
  bool learn = true;  // conflict-driven search; heavy entries assume it
};

// Result of one satisfiability question at one scope.
struct ScopeOutcome {
  SolveStatus status = SolveStatus::Unsat;
  std::optional<Interpretation> model;  // populated and verified on Sat
  SolverStats stats;
};

// Resolves a goal's premise set: absent `uses` means every axiom of the
// theory, an explicit list (possibly empty) selects by name.
std::vector<std::pair<std::string, MetaPtr>> axioms_for_goal(
    const Theory& theory, const Goal& goal);

// All scopes dominated by `limit`, smallest first (by total size, then
// componentwise), ending with `limit` itself.
std::vector<Scope> scopes_upto(const Scope& limit);

// Grounds premises plus the goal judgement (negated when `refute`), solves,
// and on Sat decodes, re-checks the witness against the reference evaluator
// and canonicalizes it.  Throws std::logic_error if a witness fails the
// re-check, since that would mean the encoding and the evaluator disagree.
ScopeOutcome solve_goal_at_scope(const Theory& theory,
                                 const std::vector<MetaPtr>& premises,
                                 const MetaPtr& goal, bool refute,
                                 const Scope& scope,
                                 const CorpusOptions& opts);

// Re-evaluates a candidate witness; empty string when it checks out.
std::string verify_witness(const Theory& theory, const Interpretation& I,
                           const std::vector<MetaPtr>& premises,
                           const MetaPtr& goal, bool goal_should_hold,
                           const ConditionSet& conditions);

struct GoalResult {
  std::string name;
  Expect kind = Expect::BoundedValid;
  Scope scope;
  std::string anchor;
  bool reconstructed_defs = false;
  std::vector<std::string> premise_names;
  std::string outcome;  // "pass" | "fail" | "timeout"
  std::string detail;
  std::vector<Scope> scopes_checked;
  std::optional<Interpretation> model;
  SolverStats stats;
  double seconds = 0;
};

GoalResult run_goal(const Theory& theory, const Goal& goal,
                    const CorpusOptions& opts);

struct CorpusReport {
  std::vector<std::string> conditions;
  bool deterministic = false;
  std::vector<GoalResult> goals;
  bool all_passed = true;

  std::string to_text() const;
  std::string to_json() const;
};

// Runs every goal of the theory in order.  The two load-bearing frame
// conditions (C-avpv and sem_5ab) are always enforced here regardless of
// the options, so corpus verdicts cannot be weakened by a stray toggle.
CorpusReport run_corpus(const Theory& theory, const CorpusOptions& opts);

}  // namespace deonmf
