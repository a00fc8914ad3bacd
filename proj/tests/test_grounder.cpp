// CNF translation: variable layout, frame clauses, determinism, DIMACS,
// and agreement between solver-side enumeration and the naive evaluator.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deonmf/grounder.hpp"
#include "deonmf/parser.hpp"
#include "deonmf/semantics.hpp"
#include "deonmf/solver.hpp"
#include "deonmf/sortcheck.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace deonmf;

namespace {

Theory small_theory() {
  return parse_theory("consts\n  A : M\n  B : M\n");
}

Theory empty_theory() { return parse_theory("axiom t : valid true\n"); }

std::string corpus_path(const char* file) {
  return std::string(DEONMF_SOURCE_DIR) + "/corpus/" + file;
}

// Encodes an interpretation as a positive assignment over the core block.
std::vector<std::int8_t> encode_assignment(const Grounder& g,
                                           const Interpretation& I) {
  const VarMap& vm = g.varmap();
  const Scope& s = I.scope;
  std::vector<std::int8_t> a(std::size_t(g.num_vars()) + 1, -1);
  for (int w = 0; w < s.nw; ++w) {
    for (int v = 0; v < s.nw; ++v) {
      a[vm.av(w, v)] = (I.frame.av[w] >> v & 1) ? 1 : -1;
      a[vm.pv(w, v)] = (I.frame.pv[w] >> v & 1) ? 1 : -1;
    }
  }
  for (std::uint64_t x = 0; x < (1ull << s.nw); ++x) {
    for (std::uint64_t y = 0; y < (1ull << s.nw); ++y) {
      a[vm.ob(x, y)] = (I.frame.ob[x] >> y & 1) ? 1 : -1;
    }
  }
  for (int c = 0; c < s.nc; ++c) {
    for (int w = 0; w < s.nw; ++w) {
      a[vm.world_sel(c, w)] = I.frame.world_of[c] == w ? 1 : -1;
    }
    for (int e = 0; e < s.ne; ++e) {
      a[vm.agent_sel(c, e)] = I.frame.agent_of[c] == e ? 1 : -1;
    }
  }
  for (std::size_t ti = 0; ti < vm.tables.size(); ++ti) {
    const auto& tv = vm.tables[ti];
    const Table* tab = I.table(tv.name);
    REQUIRE(tab != nullptr);
    if (tv.result == Sort::m()) {
      for (std::uint64_t tuple = 0; tuple < tv.tuple_count; ++tuple) {
        for (int c = 0; c < s.nc; ++c) {
          for (int w = 0; w < s.nw; ++w) {
            const bool bit = tab->cells[tuple] >> (c * s.nw + w) & 1;
            a[vm.m_cell(ti, tuple, c, w)] = bit ? 1 : -1;
          }
        }
      }
    } else {
      const std::uint64_t size = universe_size(tv.result, s);
      for (std::uint64_t v = 0; v < size; ++v) {
        a[vm.base_sel(ti, v)] = tab->cells[0] == v ? 1 : -1;
      }
    }
  }
  return a;
}

// Serializations of every interpretation the CNF admits, via exhaustive
// enumeration projected onto the core block.
std::multiset<std::string> solver_model_set(const Theory& t,
                                            const std::vector<MetaPtr>& prems,
                                            const Scope& scope,
                                            const ConditionSet& cs) {
  Grounder g(t, scope, cs);
  for (const MetaPtr& p : prems) g.require(g.ground_meta(p));
  std::vector<int> projection;
  for (int v = 1; v <= g.varmap().core_count; ++v) projection.push_back(v);
  std::multiset<std::string> out;
  if (g.contradiction()) return out;
  enumerate_models(g.num_vars(), g.clauses(), projection, SolverOptions{},
                   [&](const std::vector<std::int8_t>& a) {
                     out.insert(serialize_interpretation(g.decode(a)));
                     return true;
                   });
  return out;
}

std::multiset<std::string> naive_model_set(const Theory& t,
                                           const std::vector<MetaPtr>& prems,
                                           const Scope& scope,
                                           const ConditionSet& cs) {
  std::multiset<std::string> out;
  for (const Interpretation& I :
       oracle::enumerate_interpretations(t, prems, scope, cs)) {
    out.insert(serialize_interpretation(I));
  }
  return out;
}

}  // namespace

TEST_CASE("core variable layout is contiguous and named") {
  Theory t = small_theory();
  const Scope scope{1, 1, 2};
  Grounder g(t, scope, ConditionSet{});
  const VarMap& vm = g.varmap();
  // av and pv blocks: nw*nw bits each.
  CHECK(vm.av(0, 0) == vm.av0);
  CHECK(vm.pv0 == vm.av0 + 4);
  CHECK(vm.ob0 == vm.pv0 + 4);
  // ob block: one bit per (X, Y) pair of world sets.
  CHECK(vm.world0 == vm.ob0 + 16);
  CHECK(vm.agent0 == vm.world0 + 2);
  REQUIRE(vm.tables.size() == 2);
  CHECK(vm.tables[0].name == "A");
  CHECK(vm.tables[1].name == "B");
  // A character constant at one context and two worlds holds two bits.
  CHECK(vm.tables[0].var_count == 2);
  CHECK(vm.tables[1].var_count == 2);
  CHECK(vm.core_count == 4 + 4 + 16 + 2 + 1 + 2 + 2);
  CHECK(vm.find("A") != nullptr);
  CHECK(vm.find("missing") == nullptr);
  // Every core variable has a stable printable name.
  std::set<std::string> names;
  for (int v = 1; v <= vm.core_count; ++v) {
    const std::string n = vm.var_name(v);
    CHECK(!n.empty());
    names.insert(n);
  }
  CHECK(int(names.size()) == vm.core_count);  // no collisions
  // Auxiliary gate variables stay nameless.
  const int lit = g.ground_meta(mk_valid(mk_binary(
      CharKind::And, mk_const("A"), mk_const("B"))));
  CHECK(std::abs(lit) > vm.core_count);
  CHECK(vm.var_name(std::abs(lit)).empty());
}

TEST_CASE("nullary base constants ground to selector blocks") {
  Theory t = parse_theory("consts\n  kim : E\n  A : M\n");
  const Scope scope{1, 2, 2};
  Grounder g(t, scope, ConditionSet{});
  const VarMap& vm = g.varmap();
  const auto* tv = vm.find("kim");
  REQUIRE(tv != nullptr);
  CHECK(tv->var_count == 2);  // one selector per individual
  // The selector group carries an exactly-one constraint.
  const std::size_t ti = vm.index_of("kim");
  const int s0 = vm.base_sel(ti, 0), s1 = vm.base_sel(ti, 1);
  bool has_alo = false, has_amo = false;
  for (const auto& cl : g.clauses()) {
    if (cl == std::vector<int>{s0, s1} || cl == std::vector<int>{s1, s0}) {
      has_alo = true;
    }
    if (cl == std::vector<int>{-s0, -s1} || cl == std::vector<int>{-s1, -s0}) {
      has_amo = true;
    }
  }
  CHECK(has_alo);
  CHECK(has_amo);
}

TEST_CASE("frame clauses admit exactly the oracle frames") {
  const ConditionSet cs;
  for (const Scope& scope : {Scope{1, 1, 1}, Scope{1, 1, 2}}) {
    CAPTURE(scope.to_string());
    Theory t = empty_theory();
    Grounder g(t, scope, cs);
    g.require(g.ground_meta(*t.find_axiom("t")));
    std::vector<int> projection;
    for (int v = 1; v <= g.varmap().core_count; ++v) projection.push_back(v);
    std::set<std::string> got;
    auto res = enumerate_models(
        g.num_vars(), g.clauses(), projection, SolverOptions{},
        [&](const std::vector<std::int8_t>& a) {
          Interpretation I = g.decode(a);
          CHECK(frame_ok(I.frame, cs));
          got.insert(serialize_interpretation(I));
          return true;
        });
    CHECK(res.complete);
    std::set<std::string> expected;
    Interpretation I = make_interpretation(t.signature, scope);
    for (const Frame& f : oracle::enumerate_frames(scope, cs)) {
      I.frame = f;
      expected.insert(serialize_interpretation(I));
    }
    CHECK(got == expected);
    CHECK(got.size() == (scope.nw == 1 ? 2u : 160u));
  }
}

TEST_CASE("decoding inverts encoding on random interpretations") {
  Theory t = parse_theory("consts\n  kim : E\n  A : M\n  Nice : E -> M\n");
  const Scope scope{1, 2, 2};
  Grounder g(t, scope, ConditionSet{});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CAPTURE(seed);
    Interpretation I =
        oracle::random_interpretation(t, scope, ConditionSet{}, seed);
    const auto a = encode_assignment(g, I);
    CHECK(serialize_interpretation(g.decode(a)) ==
          serialize_interpretation(I));
  }
}

TEST_CASE("encoded interpretations satisfy exactly the clauses their truth demands") {
  // A valid interpretation's encoding satisfies every frame clause; an
  // invalid frame's encoding violates at least one.
  Theory t = empty_theory();
  const Scope scope{1, 1, 2};
  const ConditionSet cs;
  Grounder g(t, scope, cs);
  const int core = g.varmap().core_count;
  auto core_clauses_satisfied = [&](const std::vector<std::int8_t>& a) {
    for (const auto& cl : g.clauses()) {
      bool sat = false, core_only = true;
      for (int l : cl) {
        if (std::abs(l) > core) {
          core_only = false;
          break;
        }
        if ((l > 0) == (a[std::size_t(std::abs(l))] > 0)) sat = true;
      }
      if (core_only && !sat) return false;
    }
    return true;
  };
  Interpretation I = make_interpretation(t.signature, scope);
  int valid_seen = 0, invalid_seen = 0;
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  auto rnd = [&] {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  };
  for (int round = 0; round < 2000; ++round) {
    if (round % 2 == 0) {
      // Admissible frames are rare among uniform draws, so sample them
      // from the admissible-frame generator directly.
      I = oracle::random_interpretation(t, scope, cs, std::uint64_t(round));
    } else {
      for (int w = 0; w < 2; ++w) {
        I.frame.av[w] = rnd() & 3;
        I.frame.pv[w] = rnd() & 3;
      }
      for (int x = 0; x < 4; ++x) I.frame.ob[x] = rnd() & 15;
      I.frame.world_of[0] = int(rnd() % 2);
      I.frame.agent_of[0] = 0;
    }
    const bool ok = frame_ok(I.frame, cs);
    (ok ? valid_seen : invalid_seen)++;
    CHECK(core_clauses_satisfied(encode_assignment(g, I)) == ok);
  }
  CHECK(valid_seen > 20);
  CHECK(invalid_seen > 20);
}

TEST_CASE("grounding is deterministic across fresh grounders") {
  Theory t = parse_theory_file(corpus_path("gewirth.dl"));
  const Goal* goal = t.find_goal("pgc-bounded");
  REQUIRE(goal != nullptr);
  auto build = [&](std::vector<std::vector<int>>& clauses, int& nvars) {
    Grounder g(t, goal->scope, ConditionSet{});
    for (const auto& [name, ax] : t.axioms) g.require(g.ground_meta(ax));
    g.require(-g.ground_meta(goal->formula));
    clauses = g.clauses();
    nvars = g.num_vars();
  };
  std::vector<std::vector<int>> c1, c2;
  int n1 = 0, n2 = 0;
  build(c1, n1);
  build(c2, n2);
  CHECK(n1 == n2);
  CHECK(c1 == c2);
  CHECK(!c1.empty());
}

TEST_CASE("dimacs output reads back losslessly") {
  Theory t = parse_theory_file(corpus_path("gewirth.dl"));
  const Goal* goal = t.find_goal("pgc-bounded");
  REQUIRE(goal != nullptr);
  Grounder g(t, goal->scope, ConditionSet{});
  for (const auto& [name, ax] : t.axioms) g.require(g.ground_meta(ax));
  g.require(-g.ground_meta(goal->formula));

  std::ostringstream os;
  g.to_dimacs(os);
  std::istringstream in(os.str());
  DimacsFile file = read_dimacs(in);
  CHECK(file.nvars == g.num_vars());
  REQUIRE(file.clauses.size() == g.clauses().size());
  CHECK(file.clauses == g.clauses());
  // Core variables carry their names through the comment channel.
  REQUIRE(int(file.var_names.size()) > g.varmap().core_count);
  for (int v = 1; v <= g.varmap().core_count; ++v) {
    CHECK(file.var_names[std::size_t(v)] == g.varmap().var_name(v));
  }
  // Both sides are unsatisfiable (the refutation regression).
  SolverOptions opts;
  opts.learn = true;
  CHECK(solve_cnf(g.num_vars(), g.clauses(), opts).status ==
        SolveStatus::Unsat);
  CHECK(solve_cnf(file.nvars, file.clauses, opts).status ==
        SolveStatus::Unsat);
}

TEST_CASE("solver enumeration matches the naive evaluator model set") {
  Theory t = small_theory();
  const ConditionSet cs;
  CharPtr A = mk_const("A"), B = mk_const("B");

  struct Query {
    const char* label;
    std::vector<MetaPtr> premises;
  };
  const std::vector<Query> queries = {
      {"unconstrained", {}},
      {"valid-imp", {mk_valid(mk_binary(CharKind::Imp, A, B))}},
      {"validd-a", {mk_validd(A)}},
      {"boxa", {mk_valid(mk_unary(CharKind::BoxA, A))}},
      {"oba-vacuity",
       {mk_validd(mk_unary(CharKind::Not, mk_unary(CharKind::ObA, A)))}},
      {"quantified",
       {mk_valid(mk_quant(CharKind::Exists, "x", Sort::m(),
                          mk_binary(CharKind::And, mk_var("x"),
                                    mk_unary(CharKind::Not, A))))}},
      {"dyadic",
       {mk_validd(mk_binary(CharKind::ObDyadic, A, B)),
        mk_validd(mk_unary(CharKind::DiaP, B))}},
  };
  for (const Scope& scope : {Scope{1, 1, 1}, Scope{1, 1, 2}}) {
    for (const Query& q : queries) {
      CAPTURE(scope.to_string());
      CAPTURE(q.label);
      const auto got = solver_model_set(t, q.premises, scope, cs);
      const auto want = naive_model_set(t, q.premises, scope, cs);
      CHECK(got.size() == want.size());
      CHECK(got == want);
    }
  }
}

TEST_CASE("solver and naive enumeration agree with conditions toggled off") {
  Theory t = small_theory();
  ConditionSet cs = ConditionSet::all_disabled();
  cs.set("C-avpv", true);
  cs.set("sem_5ab", true);
  std::vector<MetaPtr> prems = {mk_validd(mk_const("A"))};
  const Scope scope{1, 1, 1};
  const auto got = solver_model_set(t, prems, scope, cs);
  const auto want = naive_model_set(t, prems, scope, cs);
  CHECK(!got.empty());
  CHECK(got == want);
}

TEST_CASE("statically false requirements are flagged before solving") {
  Theory t = small_theory();
  Grounder g(t, Scope{1, 1, 1}, ConditionSet{});
  CHECK_FALSE(g.contradiction());
  g.require(kFalseLit);
  CHECK(g.contradiction());

  // A pair of opposite unit requirements is not detected statically; the
  // solver refutes it instead.
  Grounder h(t, Scope{1, 1, 1}, ConditionSet{});
  const int lit = h.ground_meta(mk_valid(mk_const("A")));
  h.require(lit);
  h.require(-lit);
  CHECK_FALSE(h.contradiction());
  CHECK(solve_cnf(h.num_vars(), h.clauses(), SolverOptions{}).status ==
        SolveStatus::Unsat);
}

TEST_CASE("meta level grounding matches the evaluator verdict per interpretation") {
  // For each admissible interpretation, the grounded judgement literal under
  // the interpretation's encoding equals the evaluator's verdict: checked by
  // requiring the judgement and comparing the admitted model sets against
  // the evaluator-filtered enumeration (covered above), and here by spot
  // checks on single frames via unit assumptions on the core block.
  Theory t = small_theory();
  const Scope scope{1, 1, 2};
  const ConditionSet cs;
  MetaPtr judgement = mk_validd(mk_unary(CharKind::ObI, mk_const("A")));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    Interpretation I = oracle::random_interpretation(t, scope, cs, seed);
    Grounder g(t, scope, cs);
    const int lit = g.ground_meta(judgement);
    const bool want = eval_meta(t, I, judgement);
    // Pin the whole core block to this interpretation, then ask whether the
    // judgement literal can be true (resp. false).
    auto assignment = encode_assignment(g, I);
    std::vector<std::vector<int>> clauses = g.clauses();
    for (int v = 1; v <= g.varmap().core_count; ++v) {
      clauses.push_back({assignment[std::size_t(v)] > 0 ? v : -v});
    }
    clauses.push_back({want ? lit : -lit});
    CHECK(solve_cnf(g.num_vars(), clauses).status == SolveStatus::Sat);
    clauses.back() = {want ? -lit : lit};
    CHECK(solve_cnf(g.num_vars(), clauses).status == SolveStatus::Unsat);
  }
}
