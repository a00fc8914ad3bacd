#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "deonmf/ast.hpp"
#include "deonmf/semantics.hpp"

namespace deonmf {

// Literals are DIMACS-style nonzero ints over 1-based variables, plus two
// sentinels for folded constants.  Negation is integer negation, which maps
// one sentinel onto the other.
inline constexpr int kTrueLit = std::numeric_limits<int>::max();
inline constexpr int kFalseLit = -kTrueLit;

inline bool is_const_lit(int l) { return l == kTrueLit || l == kFalseLit; }

// Clause store with constant folding and structurally cached Tseitin gates.
// Every gate is defined biconditionally, so gate literals may be used in
// either polarity.  Construction order is deterministic for fixed inputs.
class CnfBuilder {
 public:
  int new_var() { return ++nvars_; }

  // Adds a clause after folding: true literals satisfy the clause (dropped),
  // false literals are removed, complementary pairs make it a tautology.
  // An empty clause after folding marks the formula contradictory.
  void add(std::vector<int> lits);

  int mk_and(std::vector<int> lits);
  int mk_or(std::vector<int> lits);
  int mk_iff(int a, int b);
  int mk_imp(int a, int b) { return mk_or({-a, b}); }

  // Gate asserting t == lits[i] whenever sels[i] holds.  Sound only when the
  // selector group is covered by an exactly-one constraint, which this class
  // does not emit itself.
  int selector_gate(const std::vector<int>& sels, const std::vector<int>& lits);

  // Emits pairwise at-most-one plus at-least-one over a selector group.
  void exactly_one(const std::vector<int>& sels);

  int num_vars() const { return nvars_; }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }
  bool contradiction() const { return contradiction_; }

 private:
  int gate(int tag, std::vector<int> key, const std::function<int()>& build);

  int nvars_ = 0;
  bool contradiction_ = false;
  std::vector<std::vector<int>> clauses_;
  std::map<std::pair<int, std::vector<int>>, int> cache_;
};

// Layout of the propositional core variables for a scope and signature.
// Order: av cells, pv cells, ob cells, situated-world selectors,
// situated-agent selectors, then one block per signature constant in
// declaration order.  Auxiliary Tseitin variables follow the core block.
struct VarMap {
  struct TableVars {
    std::string name;
    std::vector<Sort> arg_sorts;
    std::vector<std::uint64_t> arg_sizes;
    Sort result = Sort::m();
    std::uint64_t tuple_count = 1;
    int base = 0;  // first variable id of the block
    int var_count = 0;
  };

  Scope scope;
  int av0 = 0, pv0 = 0, ob0 = 0, world0 = 0, agent0 = 0;
  std::vector<TableVars> tables;
  int core_count = 0;

  int av(int w, int v) const { return av0 + w * scope.nw + v; }
  int pv(int w, int v) const { return pv0 + w * scope.nw + v; }
  int ob(std::uint64_t x, std::uint64_t y) const {
    return ob0 + static_cast<int>((x << scope.nw) | y);
  }
  int world_sel(int c, int w) const { return world0 + c * scope.nw + w; }
  int agent_sel(int c, int e) const { return agent0 + c * scope.ne + e; }
  // Bit (c,w) of the value of table `ti` at `tuple` (M-result tables).
  int m_cell(std::size_t ti, std::uint64_t tuple, int c, int w) const {
    return tables[ti].base +
           static_cast<int>(tuple) * (scope.nc * scope.nw) + c * scope.nw + w;
  }
  // Selector for value `v` of a nullary base-sorted constant's block.
  int base_sel(std::size_t ti, std::uint64_t v) const {
    return tables[ti].base + static_cast<int>(v);
  }

  const TableVars* find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  // Human-readable name for a core variable; empty for auxiliaries.
  std::string var_name(int v) const;
};

// Translates a theory at a fixed scope into CNF.  Frame-condition clauses
// and selector exactly-one constraints are emitted at construction; formulas
// are grounded on demand and pinned with `require`.
class Grounder {
 public:
  Grounder(const Theory& theory, const Scope& scope, const ConditionSet& cs,
           std::uint64_t cell_budget = kDefaultCellBudget);

  // Grounds a closed judgement / formula to a defining literal.
  int ground_meta(const MetaPtr& m);
  int ground_char_at(const CharPtr& f, int c, int w);

  // Unit-asserts a literal (no-op for true, contradiction for false).
  void require(int lit);

  const VarMap& varmap() const { return vars_; }
  int num_vars() const { return cnf_.num_vars(); }
  const std::vector<std::vector<int>>& clauses() const {
    return cnf_.clauses();
  }
  bool contradiction() const { return cnf_.contradiction(); }

  // DIMACS with `c` var-name comments for the core block.
  void to_dimacs(std::ostream& os) const;

  // Reads a total assignment indexed by variable id (entry v nonzero means
  // true) back into an interpretation.
  Interpretation decode(const std::vector<std::int8_t>& assignment) const;

 private:
  struct Cand {
    int guard;  // kTrueLit when unconditional
    std::uint64_t value;
  };
  using Env = std::vector<std::pair<std::string, std::uint64_t>>;

  int ground(const MetaPtr& m, Env& env);
  int ground(const CharPtr& f, Env& env, int c, int w);
  int atom_bit(const CharPtr& t, Env& env, int c, int w);
  int ob_lookup(const std::vector<int>& xlits, const std::vector<int>& ylits);
  std::vector<int> m_lits(const CharPtr& f, Env& env);
  std::vector<int> p_lits(const CharPtr& t, Env& env);
  std::vector<Cand> term_candidates(const CharPtr& t, Env& env);
  std::vector<Cand> bits_to_candidates(const std::vector<int>& bits);
  int table_lookup_bit(std::size_t ti, const std::vector<CharPtr>& args,
                       Env& env, int c, int w);
  int atctx_lit(const CharPtr& f, Env& env, int c);
  std::uint64_t env_lookup(const std::string& name, const Env& env) const;
  const std::vector<std::string>& node_free_vars(const CharPtr& f);
  CharPtr expanded_char(const CharPtr& f);
  MetaPtr expanded_meta(const MetaPtr& m);

  const Theory& theory_;
  Scope scope_;
  ConditionSet conds_;
  std::uint64_t budget_;
  VarMap vars_;
  CnfBuilder cnf_;
  std::unordered_map<const CharNode*, CharPtr> expand_cache_;
  std::unordered_map<const MetaNode*, MetaPtr> expand_meta_cache_;
  std::unordered_map<const CharNode*, std::vector<std::string>> fv_cache_;
  // (node, c, w, values of the node's free vars in sorted name order) -> lit
  std::map<std::tuple<const CharNode*, int, int, std::vector<std::uint64_t>>,
           int>
      memo_;

  void emit_frame_conditions();
};

}  // namespace deonmf
