#include "deonmf/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace deonmf {

namespace {

double monotonic_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

std::size_t lit_index(int l) {
  return 2 * static_cast<std::size_t>(std::abs(l) - 1) + (l < 0 ? 1 : 0);
}

// Shared cooperative cancellation for cube workers.
thread_local const std::atomic<bool>* t_cancel = nullptr;

}  // namespace

std::string solve_status_to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

void SolverStats::accumulate(const SolverStats& other) {
  decisions += other.decisions;
  propagations += other.propagations;
  conflicts += other.conflicts;
  learned += other.learned;
  seconds += other.seconds;
}

std::string SolverStats::to_string(bool include_timing) const {
  std::ostringstream os;
  os << "decisions=" << decisions << "\npropagations=" << propagations
     << "\nconflicts=" << conflicts << "\nlearned=" << learned;
  if (include_timing) {
    os << "\nseconds=" << std::fixed;
    os.precision(3);
    os << seconds;
  }
  return os.str();
}

SatSolver::SatSolver(int nvars, std::vector<std::vector<int>> clauses,
                     SolverOptions opts)
    : nvars_(nvars), opts_(opts), clauses_(std::move(clauses)) {
  watches_.resize(2 * static_cast<std::size_t>(nvars_));
  occurs_.assign(nvars_ + 1, 0);
  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    auto& cl = clauses_[ci];
    for (int l : cl) {
      if (l == 0 || std::abs(l) > nvars_) {
        throw std::invalid_argument("literal out of range in clause");
      }
      occurs_[std::abs(l)] = 1;
    }
    if (cl.empty()) {
      empty_clause_ = true;
    } else if (cl.size() >= 2) {
      watches_[lit_index(cl[0])].push_back(static_cast<int>(ci));
      watches_[lit_index(cl[1])].push_back(static_cast<int>(ci));
    }
  }
}

void SatSolver::add_clause(std::vector<int> lits) {
  for (int l : lits) {
    if (l == 0 || std::abs(l) > nvars_) {
      throw std::invalid_argument("literal out of range in clause");
    }
    occurs_[std::abs(l)] = 1;
  }
  int ci = static_cast<int>(clauses_.size());
  clauses_.push_back(std::move(lits));
  auto& cl = clauses_.back();
  if (cl.empty()) {
    empty_clause_ = true;
  } else if (cl.size() >= 2) {
    watches_[lit_index(cl[0])].push_back(ci);
    watches_[lit_index(cl[1])].push_back(ci);
  }
}

bool SatSolver::enqueue(int lit, int reason) {
  int var = std::abs(lit);
  std::int8_t want = lit > 0 ? 1 : -1;
  if (value_[var] != 0) return value_[var] == want;
  value_[var] = want;
  reason_[var] = reason;
  level_[var] = static_cast<int>(decisions_.size());
  trail_.push_back(lit);
  return true;
}

bool SatSolver::deadline_passed() {
  if (t_cancel != nullptr && t_cancel->load(std::memory_order_relaxed)) {
    return true;
  }
  if (deadline_at_ == 0) return false;
  return monotonic_seconds() >= deadline_at_;
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    if ((++deadline_checks_ & 0xFFF) == 0 && deadline_passed()) return -2;
    int lit = trail_[qhead_++];
    ++stats_.propagations;
    int falsified = -lit;
    auto& wl = watches_[lit_index(falsified)];
    std::size_t i = 0, keep = 0;
    int conflict = -1;
    while (i < wl.size()) {
      int ci = wl[i];
      auto& cl = clauses_[ci];
      if (cl[0] == falsified) std::swap(cl[0], cl[1]);
      // cl[1] == falsified now
      auto val = [&](int l) -> int {
        std::int8_t v = value_[std::abs(l)];
        return v == 0 ? 0 : ((l > 0) == (v > 0) ? 1 : -1);
      };
      if (val(cl[0]) == 1) {
        wl[keep++] = wl[i++];
        continue;
      }
      bool moved = false;
      for (std::size_t j = 2; j < cl.size(); ++j) {
        if (val(cl[j]) != -1) {
          std::swap(cl[1], cl[j]);
          watches_[lit_index(cl[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) {
        ++i;  // dropped from this watch list
        continue;
      }
      if (val(cl[0]) == -1) {
        conflict = ci;
        // keep remaining watches intact
        while (i < wl.size()) wl[keep++] = wl[i++];
        break;
      }
      enqueue(cl[0], ci);
      wl[keep++] = wl[i++];
    }
    wl.resize(keep);
    if (conflict >= 0) return conflict;
  }
  return -1;
}

bool SatSolver::heap_less(int u, int v) const {
  if (activity_[u] != activity_[v]) return activity_[u] < activity_[v];
  return u > v;  // ties favour the lower variable index
}

void SatSolver::heap_up(std::size_t i) {
  int v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_less(heap_[parent], v)) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void SatSolver::heap_down(std::size_t i) {
  int v = heap_[i];
  const std::size_t n = heap_.size();
  while (true) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(heap_[child], heap_[child + 1])) ++child;
    if (!heap_less(v, heap_[child])) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void SatSolver::heap_insert(int var) {
  if (heap_pos_[var] >= 0) return;
  heap_.push_back(var);
  heap_pos_[var] = static_cast<int>(heap_.size()) - 1;
  heap_up(heap_.size() - 1);
}

int SatSolver::heap_pop_max() {
  int top = heap_[0];
  heap_pos_[top] = -1;
  int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

void SatSolver::bump_activity(int var) {
  activity_[var] += var_inc_;
  if (activity_[var] > 1e100) {
    for (int v = 1; v <= nvars_; ++v) activity_[v] *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[var] >= 0) heap_up(heap_pos_[var]);
}

// First-UIP conflict analysis. Resolves the conflict clause against reasons
// along the trail until exactly one literal of the current decision level
// remains (the unique implication point). On return learnt[0] is the UIP
// literal, learnt[1] (when present) a literal of the backjump level, and
// bj_level the level the search must return to for the clause to assert.
// Returns false only for a conflict at decision level zero, i.e. Unsat.
bool SatSolver::analyze_cdcl(int confl, std::vector<int>& learnt,
                             int& bj_level) {
  const int cur_level = static_cast<int>(decisions_.size());
  if (cur_level == 0) return false;
  std::vector<char> seen(nvars_ + 1, 0);
  learnt.assign(1, 0);  // slot 0 reserved for the UIP literal
  int counter = 0;
  int p = 0;
  int idx = static_cast<int>(trail_.size()) - 1;
  int ci = confl;
  while (true) {
    for (int q : clauses_[ci]) {
      int v = std::abs(q);
      if (v == std::abs(p)) continue;  // the literal this clause implied
      if (!seen[v] && level_[v] > 0) {
        seen[v] = 1;
        if (!opts_.deterministic) bump_activity(v);
        if (level_[v] == cur_level) {
          ++counter;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen[std::abs(trail_[idx])]) --idx;
    p = trail_[idx];
    seen[std::abs(p)] = 0;
    --idx;
    if (--counter == 0) break;
    ci = reason_[std::abs(p)];
    if (ci < 0) {
      throw std::logic_error("conflict analysis reached an unexplained "
                             "literal below the decision");
    }
  }
  learnt[0] = -p;
  bj_level = 0;
  std::size_t pos = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int lv = level_[std::abs(learnt[i])];
    if (lv > bj_level) {
      bj_level = lv;
      pos = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[pos]);
  return true;
}

void SatSolver::undo_to(std::size_t mark) {
  const bool dynamic = !opts_.deterministic;
  while (trail_.size() > mark) {
    int var = std::abs(trail_.back());
    if (dynamic) {
      polarity_[var] = value_[var];  // phase saving
      if (occurs_[var]) heap_insert(var);
    }
    value_[var] = 0;
    reason_[var] = -1;
    level_[var] = 0;
    next_var_hint_ = std::min(next_var_hint_, var);
    trail_.pop_back();
  }
  qhead_ = mark;
}

bool SatSolver::verify(const std::vector<std::int8_t>& assignment) const {
  for (const auto& cl : clauses_) {
    bool sat = false;
    for (int l : cl) {
      std::int8_t v = assignment[std::abs(l)];
      if ((l > 0 && v > 0) || (l < 0 && v < 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

SolveResult SatSolver::solve() {
  double start = monotonic_seconds();
  deadline_at_ =
      opts_.timeout_seconds > 0 ? start + opts_.timeout_seconds : 0;
  value_.assign(nvars_ + 1, 0);
  reason_.assign(nvars_ + 1, -1);
  level_.assign(nvars_ + 1, 0);
  trail_.clear();
  decisions_.clear();
  qhead_ = 0;
  if (!opts_.deterministic) {
    if (activity_.empty()) activity_.assign(nvars_ + 1, 0.0);
    if (polarity_.empty()) polarity_.assign(nvars_ + 1, -1);
    heap_.clear();
    heap_pos_.assign(nvars_ + 1, -1);
    for (int v = 1; v <= nvars_; ++v) {
      if (occurs_[v]) heap_insert(v);
    }
    restart_mark_ = stats_.conflicts;
    restart_limit_ = 100;
  }

  SolveResult res;
  auto finish = [&](SolveStatus st) {
    res.status = st;
    stats_.seconds = monotonic_seconds() - start;
    res.stats = stats_;
    return res;
  };

  if (empty_clause_) return finish(SolveStatus::Unsat);
  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    if (clauses_[ci].size() == 1) {
      if (!enqueue(clauses_[ci][0], static_cast<int>(ci))) {
        return finish(SolveStatus::Unsat);
      }
    }
  }

  next_var_hint_ = 1;
  while (true) {
    int confl = propagate();
    if (confl == -2) return finish(SolveStatus::Timeout);
    if (confl >= 0) {
      ++stats_.conflicts;
      if (opts_.learn) {
        // conflict-driven mode: learn a first-UIP clause, jump back to its
        // assertion level and propagate the implied literal
        std::vector<int> learnt;
        int bj_level = 0;
        if (!analyze_cdcl(confl, learnt, bj_level)) {
          return finish(SolveStatus::Unsat);
        }
        undo_to(decisions_[bj_level].trail_mark);
        decisions_.resize(bj_level);
        int uip = learnt[0];
        int reason = static_cast<int>(clauses_.size());
        add_clause(std::move(learnt));
        ++stats_.learned;
        enqueue(uip, reason);
        continue;
      }
      bool flipped_one = false;
      while (!decisions_.empty()) {
        Decision d = decisions_.back();
        decisions_.pop_back();
        undo_to(d.trail_mark);
        if (!d.flipped) {
          decisions_.push_back({-d.lit, true, trail_.size()});
          enqueue(-d.lit, -1);  // second branch: the other polarity
          flipped_one = true;
          break;
        }
      }
      if (!flipped_one) return finish(SolveStatus::Unsat);
      continue;
    }
    const bool dynamic = !opts_.deterministic;
    if (dynamic && opts_.learn &&
        stats_.conflicts - restart_mark_ >=
            static_cast<std::uint64_t>(restart_limit_)) {
      // geometric restart: keep the learned clauses, drop the decisions
      restart_mark_ = stats_.conflicts;
      restart_limit_ *= 1.5;
      if (!decisions_.empty()) {
        undo_to(decisions_[0].trail_mark);
        decisions_.clear();
      }
    }
    // pick an unassigned variable that occurs in some clause — the lowest
    // one in deterministic mode, the most active one otherwise; variables
    // mentioned by no clause are free and get the default polarity when the
    // assignment is extracted
    int v = 0;
    if (dynamic) {
      while (!heap_.empty()) {
        int cand = heap_pop_max();
        if (value_[cand] == 0) {
          v = cand;
          break;
        }
      }
    } else {
      for (int cand = next_var_hint_; cand <= nvars_; ++cand) {
        if (value_[cand] == 0 && occurs_[cand]) {
          v = cand;
          break;
        }
      }
    }
    if (v == 0) {
      std::vector<std::int8_t> total = value_;
      for (int u = 1; u <= nvars_; ++u) {
        if (total[u] == 0) total[u] = -1;
      }
      if (!verify(total)) {
        throw std::logic_error("solver produced an assignment violating a "
                               "clause; internal invariant broken");
      }
      res.assignment = std::move(total);
      return finish(SolveStatus::Sat);
    }
    next_var_hint_ = v + 1;
    ++stats_.decisions;
    int branch = dynamic && polarity_[v] > 0 ? v : -v;  // default false
    decisions_.push_back({branch, false, trail_.size()});
    enqueue(branch, -1);
    if ((stats_.decisions & 0x3FF) == 0 && deadline_passed()) {
      return finish(SolveStatus::Timeout);
    }
  }
}

namespace {

SolveResult solve_with_cubes(int nvars,
                             const std::vector<std::vector<int>>& clauses,
                             const SolverOptions& opts) {
  int k = 0;
  while ((1 << k) < opts.jobs && k < nvars && k < 12) ++k;
  const int ncubes = 1 << k;
  std::atomic<int> next{0};
  std::atomic<bool> cancel{false};
  std::vector<SolveResult> results(ncubes);
  std::vector<char> done(ncubes, 0);
  auto worker = [&]() {
    t_cancel = &cancel;
    while (true) {
      int i = next.fetch_add(1);
      if (i >= ncubes || cancel.load()) break;
      std::vector<std::vector<int>> cl = clauses;
      for (int b = 0; b < k; ++b) {
        cl.push_back({(i >> b & 1) ? (b + 1) : -(b + 1)});
      }
      SolverOptions o = opts;
      o.jobs = 1;
      SatSolver s(nvars, std::move(cl), o);
      results[i] = s.solve();
      done[i] = 1;
      if (results[i].status == SolveStatus::Sat) cancel.store(true);
    }
    t_cancel = nullptr;
  };
  std::vector<std::thread> threads;
  int nthreads = std::min(opts.jobs, ncubes);
  threads.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  SolveResult agg;
  bool timed_out = false;
  for (int i = 0; i < ncubes; ++i) {
    if (!done[i]) continue;
    agg.stats.accumulate(results[i].stats);
    if (results[i].status == SolveStatus::Timeout) timed_out = true;
  }
  for (int i = 0; i < ncubes; ++i) {
    if (done[i] && results[i].status == SolveStatus::Sat) {
      agg.status = SolveStatus::Sat;
      agg.assignment = results[i].assignment;
      return agg;
    }
  }
  // no cube satisfiable: every cube must have completed as unsat
  for (int i = 0; i < ncubes; ++i) {
    if (!done[i] || results[i].status != SolveStatus::Unsat) {
      agg.status = SolveStatus::Timeout;
      return agg;
    }
  }
  agg.status = timed_out ? SolveStatus::Timeout : SolveStatus::Unsat;
  return agg;
}

}  // namespace

SolveResult solve_cnf(int nvars, const std::vector<std::vector<int>>& clauses,
                      const SolverOptions& opts) {
  if (opts.jobs <= 1 || nvars == 0) {
    SatSolver s(nvars, clauses, opts);
    return s.solve();
  }
  return solve_with_cubes(nvars, clauses, opts);
}

EnumerationResult enumerate_models(
    int nvars, const std::vector<std::vector<int>>& clauses,
    const std::vector<int>& projection, const SolverOptions& opts,
    const std::function<bool(const std::vector<std::int8_t>&)>& on_model) {
  EnumerationResult out;
  SolverOptions o = opts;
  o.jobs = 1;
  SatSolver s(nvars, clauses, o);
  double deadline =
      opts.timeout_seconds > 0 ? monotonic_seconds() + opts.timeout_seconds
                               : 0;
  while (true) {
    if (deadline != 0) {
      double rem = deadline - monotonic_seconds();
      if (rem <= 0) {
        out.complete = false;
        break;
      }
    }
    SolveResult r = s.solve();
    out.stats.accumulate(r.stats);
    if (r.status == SolveStatus::Timeout) {
      out.complete = false;
      break;
    }
    if (r.status == SolveStatus::Unsat) break;
    ++out.count;
    if (!on_model(r.assignment)) {
      out.complete = false;
      break;
    }
    std::vector<int> block;
    if (projection.empty()) {
      for (int v = 1; v <= nvars; ++v) {
        block.push_back(r.assignment[v] > 0 ? -v : v);
      }
    } else {
      for (int v : projection) {
        block.push_back(r.assignment[v] > 0 ? -v : v);
      }
    }
    s.add_clause(std::move(block));
  }
  return out;
}

std::optional<std::vector<std::int8_t>> propagate_fixpoint(
    int nvars, const std::vector<std::vector<int>>& clauses,
    const std::vector<int>& assumptions, std::uint64_t seed) {
  std::vector<std::int8_t> value(nvars + 1, 0);
  for (int l : assumptions) {
    int v = std::abs(l);
    std::int8_t want = l > 0 ? 1 : -1;
    if (value[v] != 0 && value[v] != want) return std::nullopt;
    value[v] = want;
  }
  std::vector<std::size_t> order(clauses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t ci : order) {
      const auto& cl = clauses[ci];
      int unassigned_lit = 0;
      int unassigned_count = 0;
      bool satisfied = false;
      for (int l : cl) {
        std::int8_t v = value[std::abs(l)];
        if (v == 0) {
          ++unassigned_count;
          unassigned_lit = l;
        } else if ((l > 0) == (v > 0)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (unassigned_count == 0) return std::nullopt;
      if (unassigned_count == 1) {
        value[std::abs(unassigned_lit)] = unassigned_lit > 0 ? 1 : -1;
        changed = true;
      }
    }
  }
  return value;
}

DimacsFile read_dimacs(std::istream& in) {
  DimacsFile out;
  std::string line;
  std::vector<int> current;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      std::istringstream cs(line);
      std::string c, kw;
      int id;
      if (cs >> c >> kw >> id && kw == "var") {
        std::string name;
        std::getline(cs, name);
        if (!name.empty() && name[0] == ' ') name.erase(0, 1);
        if (id >= 0) {
          if (static_cast<std::size_t>(id) >= out.var_names.size()) {
            out.var_names.resize(id + 1);
          }
          out.var_names[id] = name;
        }
      }
      continue;
    }
    if (line[0] == 'p') {
      std::istringstream ps(line);
      std::string p, fmt;
      int ncl;
      if (!(ps >> p >> fmt >> out.nvars >> ncl) || fmt != "cnf") {
        throw std::runtime_error("malformed DIMACS header: " + line);
      }
      saw_header = true;
      continue;
    }
    std::istringstream ls(line);
    int l;
    while (ls >> l) {
      if (l == 0) {
        out.clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(l);
      }
    }
  }
  if (!current.empty()) out.clauses.push_back(current);
  if (!saw_header) {
    throw std::runtime_error("DIMACS input has no p cnf header");
  }
  for (const auto& cl : out.clauses) {
    for (int l : cl) {
      if (std::abs(l) > out.nvars) {
        throw std::runtime_error("DIMACS literal exceeds declared count");
      }
    }
  }
  return out;
}

}  // namespace deonmf
