#pragma once

// Finite interpretations and the reference evaluator.
//
// An interpretation fixes a scope (nc contexts, ne individuals, nw worlds),
// a frame (accessibility relations av/pv, the obligation neighborhood ob,
// and the context maps World/Agent), and one finite table per signature
// constant.  The evaluator computes truth of character formulas at a
// context/world point and of meta formulas outright, by direct recursion
// over the finite universes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deonmf/ast.hpp"
#include "deonmf/errors.hpp"
#include "deonmf/scope.hpp"

namespace deonmf {

inline constexpr std::uint64_t kDefaultCellBudget = 1u << 20;

// Number of values of sort `s` at `scope`.  Supported sorts: E, C, W, M, P.
// Throws UnsupportedSort otherwise, ScopeTooLarge past the cell budget.
std::uint64_t universe_size(const Sort& s, const Scope& scope,
                            std::uint64_t cell_budget = kDefaultCellBudget);

// All values of sort `s`, deterministically ordered, no duplicates.
// E/C/W values are element indices.  An M value is a bitmask with bit
// (c*nw + w) giving truth at that point; a P value concatenates one M mask
// per individual at stride nc*nw.  For every sort the i-th value equals i.
std::vector<std::uint64_t> value_universe(
    const Sort& s, const Scope& scope,
    std::uint64_t cell_budget = kDefaultCellBudget);

// The eight frame conditions, individually toggleable.
struct ConditionSet {
  bool c_avpv = true;        // av(w) is a subset of pv(w)
  bool sem_5ab = true;       // Y in ob(X) implies X and Y intersect
  bool nonempty_av = true;   // av(w) nonempty
  bool pv_refl = true;       // w in pv(w)
  bool ob_ext = true;        // equal intersections with X force equal ob(X) status
  bool ob_closure = true;    // ob(X) closed under intersections touching X
  bool ob_up = true;         // Y in ob(X), Y<=X<=Z gives (Z\X)|Y in ob(Z)
  bool ob_down = true;       // Y<=X, Z in ob(X), Y meets Z gives Z in ob(Y)

  static const std::vector<std::string>& names();
  bool get(const std::string& name) const;
  void set(const std::string& name, bool value);  // throws on unknown name
  std::vector<std::string> active() const;

  static ConditionSet all_disabled();
};

using WorldSet = std::uint64_t;  // bitmask over world indices

struct Frame {
  Scope scope;
  std::vector<WorldSet> av;          // size nw
  std::vector<WorldSet> pv;          // size nw
  std::vector<std::uint64_t> ob;     // size 2^nw; bit Y of ob[X]: Y in ob(X)
  std::vector<int> world_of;         // size nc
  std::vector<int> agent_of;         // size nc

  static Frame empty(const Scope& s);  // all-zero relations, maps to 0
};

struct Violation {
  std::string condition;
  std::string detail;  // witness description
};

// All violations of the enabled conditions, with witnesses.
std::vector<Violation> frame_conditions_check(const Frame& f,
                                              const ConditionSet& cs);
bool frame_ok(const Frame& f, const ConditionSet& cs);

// Finite function attached to one constant.  Argument sorts come from
// {E, C, W, M, P}; the result is either M (cells hold M masks, one per
// argument tuple) or a base sort E/C/W for a nullary constant (cells[0]
// holds the element index).
struct Table {
  std::vector<Sort> arg_sorts;
  Sort result = Sort::m();
  std::vector<std::uint64_t> arg_sizes;  // per argument, at the scope
  std::vector<std::uint64_t> cells;

  std::uint64_t tuple_count() const;
  // Mixed-radix flattening of an argument tuple, first argument varies
  // slowest.
  std::uint64_t flat_index(const std::vector<std::uint64_t>& args) const;
};

// Splits a constant's sort into table argument sorts plus result.
// Nullary E/C/W constants are allowed; results other than M on applied
// constants are rejected with UnsupportedSort.
struct TableShape {
  std::vector<Sort> arg_sorts;
  Sort result = Sort::m();
};
TableShape table_shape(const std::string& name, const Sort& s);

Table make_table(const std::string& name, const Sort& s, const Scope& scope,
                 std::uint64_t cell_budget = kDefaultCellBudget);

struct Interpretation {
  Scope scope;
  Frame frame;
  std::vector<std::pair<std::string, Table>> tables;  // signature order

  const Table* table(const std::string& name) const;
  Table* table(const std::string& name);
};

// Builds an all-zero interpretation carrying a table for every user
// constant of the signature.
Interpretation make_interpretation(const Signature& sig, const Scope& scope,
                                   std::uint64_t cell_budget = kDefaultCellBudget);

// Direct recursive evaluator with memoization for closed subformulas.
class Evaluator {
 public:
  Evaluator(const Theory& theory, const Interpretation& interp);

  bool eval_char(const CharPtr& f, int c, int w);  // f closed
  bool eval_meta(const MetaPtr& m);                // m closed

 private:
  struct Value {
    std::uint64_t v = 0;  // index or packed mask, by the term's sort
  };
  using Env = std::vector<std::pair<std::string, Value>>;

  bool eval(const CharPtr& f, Env& env, int c, int w);
  bool eval(const MetaPtr& m, Env& env);
  Value term_value(const CharPtr& t, Env& env);
  std::uint64_t content_at(const CharPtr& f, Env& env, int c);  // world mask
  std::uint64_t m_value_of(const CharPtr& f, Env& env);  // (context,world) mask
  bool is_closed(const CharPtr& f);
  CharPtr expanded(const CharPtr& f);

  const Theory& theory_;
  const Interpretation& interp_;
  int nc_, ne_, nw_;
  std::unordered_map<const CharNode*, bool> closed_;
  std::unordered_map<const CharNode*, CharPtr> expand_cache_;
  // (node, c, w) -> truth for closed nodes
  std::unordered_map<std::uint64_t, bool> memo_;
  std::unordered_map<const CharNode*, bool> validd_memo_;
  const CharNode* memo_epoch_ = nullptr;
};

// Convenience wrappers constructing a throwaway evaluator.
bool eval_char(const Theory& t, const Interpretation& I, const CharPtr& f,
               int c, int w);
bool eval_meta(const Theory& t, const Interpretation& I, const MetaPtr& m);

// Canonical representative of the isomorphism class of `I` under
// sort-respecting bijective renamings of worlds, contexts and individuals:
// the candidate with the least serialization.
Interpretation canonical_form(const Interpretation& I);

// Renaming application used by canonical_form, exposed for tests.
Interpretation apply_renaming(const Interpretation& I,
                              const std::vector<int>& perm_w,
                              const std::vector<int>& perm_c,
                              const std::vector<int>& perm_e);

// Deterministic byte serialization; equal iff interpretations equal.
std::string serialize_interpretation(const Interpretation& I);

// Human-readable model report; stable for a fixed interpretation.
std::string render_model_text(const Interpretation& I);
// JSON report as a string with stable key order.
std::string render_model_json(const Interpretation& I, int indent = 2);

}  // namespace deonmf
