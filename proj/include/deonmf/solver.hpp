#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace deonmf {

enum class SolveStatus { Sat, Unsat, Timeout };

std::string solve_status_to_string(SolveStatus s);

struct SolverOptions {
  bool learn = false;  // conflict-driven search with first-UIP learning
  // true: decisions follow the fixed ascending variable order with
  // false-first polarity, no restarts — a reproducible first model whose
  // search path depends only on the clause set.  false: decisions follow
  // conflict-driven variable activities with phase saving and restarts
  // (still free of randomness, so single-worker runs repeat exactly).
  bool deterministic = true;
  double timeout_seconds = 0;  // 0 disables the deadline
  int jobs = 1;                // >1 splits the search over sign cubes
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t learned = 0;
  double seconds = 0;

  void accumulate(const SolverStats& other);
  // One key=value pair per line; timing omitted when include_timing is false.
  std::string to_string(bool include_timing = true) const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  // 1-based truth values (+1 / -1), populated only for Sat.
  std::vector<std::int8_t> assignment;
  SolverStats stats;
};

// DPLL-style search over two-watched-literal clauses.  The baseline
// (learn = false) uses the fixed ascending variable order with false-first
// polarity and chronological backtracking by flipping the deepest untried
// decision.  With learn = true the solver records a first-UIP clause at
// every conflict and jumps back to its assertion level; when additionally
// deterministic = false, decisions follow conflict-driven variable
// activities with saved phases and geometric restarts.  Every satisfying
// assignment is re-checked against the full clause set before it is
// returned.
class SatSolver {
 public:
  SatSolver(int nvars, std::vector<std::vector<int>> clauses,
            SolverOptions opts = {});

  SolveResult solve();

  // Adds a clause permanently (used for model blocking between solves).
  void add_clause(std::vector<int> lits);

 private:
  struct Decision {
    int lit;  // the literal tried on the first branch
    bool flipped;
    std::size_t trail_mark;
  };

  bool enqueue(int lit, int reason);
  int propagate();  // returns conflicting clause id or -1
  bool analyze_cdcl(int confl, std::vector<int>& learnt, int& bj_level);
  void undo_to(std::size_t mark);
  bool verify(const std::vector<std::int8_t>& assignment) const;
  bool deadline_passed();
  void bump_activity(int var);
  void heap_insert(int var);
  int heap_pop_max();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  bool heap_less(int u, int v) const;

  int nvars_;
  SolverOptions opts_;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal index
  std::vector<std::int8_t> value_;         // per var: 0 unset, +1, -1
  std::vector<int> reason_;                // per var: clause id or -1
  std::vector<int> level_;                 // per var: decision depth
  std::vector<int> trail_;
  std::vector<Decision> decisions_;
  std::size_t qhead_ = 0;
  int next_var_hint_ = 1;
  std::vector<char> occurs_;
  bool empty_clause_ = false;
  // activity-ordered decisions (used when !opts_.deterministic)
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<int> heap_;      // max-heap of candidate decision variables
  std::vector<int> heap_pos_;  // per var: index into heap_, -1 when absent
  std::vector<std::int8_t> polarity_;  // saved phase per var (-1 initial)
  std::uint64_t restart_mark_ = 0;     // conflicts at the last restart
  double restart_limit_ = 100;
  SolverStats stats_;
  std::uint64_t deadline_checks_ = 0;
  double deadline_at_ = 0;  // monotonic seconds; 0 = none
};

// Solves with optional cube-split parallelism (opts.jobs workers over sign
// cubes on the lowest variables).  With jobs <= 1 this is the plain solver.
SolveResult solve_cnf(int nvars, const std::vector<std::vector<int>>& clauses,
                      const SolverOptions& opts = {});

// Enumerates satisfying assignments projected onto `projection` (all
// variables when empty), blocking each found projection.  Returns the models
// via the callback until it returns false or the deadline passes.  The
// second member reports whether enumeration was exhaustive.
struct EnumerationResult {
  std::uint64_t count = 0;
  bool complete = true;  // false when stopped early or timed out
  SolverStats stats;
};
EnumerationResult enumerate_models(
    int nvars, const std::vector<std::vector<int>>& clauses,
    const std::vector<int>& projection, const SolverOptions& opts,
    const std::function<bool(const std::vector<std::int8_t>&)>& on_model);

// Queue-free reference propagation: repeatedly sweeps the clauses in a
// seed-shuffled order, assigning forced literals, until a fixpoint or a
// conflict (nullopt).  Exposed so order-independence can be tested.
std::optional<std::vector<std::int8_t>> propagate_fixpoint(
    int nvars, const std::vector<std::vector<int>>& clauses,
    const std::vector<int>& assumptions, std::uint64_t seed);

// DIMACS reader; accepts `c var <id> <name>` comments naming variables.
struct DimacsFile {
  int nvars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> var_names;  // indexed by var id, may be empty
};
DimacsFile read_dimacs(std::istream& in);

}  // namespace deonmf
