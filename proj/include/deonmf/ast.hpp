#pragma once

// Abstract syntax for the surface language.
//
// A CharFormula denotes a character (sort M): a function from contexts to
// intensions.  A MetaFormula denotes a truth value (sort Prop) built from
// validity judgements over characters.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deonmf/scope.hpp"
#include "deonmf/sorts.hpp"

namespace deonmf {

enum class CharKind : std::uint8_t {
  Top,       // lifted truth
  Bottom,    // lifted falsity
  Const,     // signature constant (or definition head)
  Var,       // bound variable occurrence
  Elem,      // internal: a ground universe element (never parsed)
  App,       // application, a = function part, b = argument
  Not, And, Or, Imp, Iff,
  BoxA, DiaA,        // quantifiers over actually-possible worlds (av)
  BoxP, DiaP,        // quantifiers over potentially-possible worlds (pv)
  BoxD,              // indexical a-priori necessity
  ObDyadic,          // O<body | condition>, neighborhood obligation
  ObA, ObI,          // actual / ideal obligation with non-vacuity conjunct
  Forall, Exists,    // sorted quantifiers, binder in `name`
};

struct CharNode;
using CharPtr = std::shared_ptr<const CharNode>;

struct CharNode {
  CharKind kind;
  std::string name;               // Const/Var name; Forall/Exists binder
  std::optional<Sort> binder;     // Forall/Exists binder sort; Elem sort
  std::uint64_t elem = 0;         // Elem universe index
  CharPtr a, b;
  int line = 0, col = 0;          // source position when parsed
};

CharPtr mk_top();
CharPtr mk_bottom();
CharPtr mk_const(std::string name, int line = 0, int col = 0);
CharPtr mk_var(std::string name, int line = 0, int col = 0);
CharPtr mk_elem(Sort s, std::uint64_t index);
CharPtr mk_app(CharPtr f, CharPtr arg);
CharPtr mk_unary(CharKind k, CharPtr a);
CharPtr mk_binary(CharKind k, CharPtr a, CharPtr b);
CharPtr mk_quant(CharKind k, std::string var, Sort s, CharPtr body);

enum class MetaKind : std::uint8_t {
  Valid,         // true at every context and world
  ValidD,        // true at every context's designated world
  ValidCtx,      // true at every world of one context
  AtCtx,         // true at one context's designated world
  MetaImp, MetaAnd,
  MetaForallCtx,
};

struct MetaNode;
using MetaPtr = std::shared_ptr<const MetaNode>;

struct MetaNode {
  MetaKind kind;
  CharPtr formula;    // Valid/ValidD/ValidCtx/AtCtx
  CharPtr ctx;        // ValidCtx/AtCtx: a term of sort C
  std::string var;    // MetaForallCtx binder
  MetaPtr l, r;       // MetaImp/MetaAnd; MetaForallCtx body in l
  int line = 0, col = 0;
};

MetaPtr mk_valid(CharPtr f);
MetaPtr mk_validd(CharPtr f);
MetaPtr mk_validctx(CharPtr ctx, CharPtr f);
MetaPtr mk_atctx(CharPtr ctx, CharPtr f);
MetaPtr mk_metaimp(MetaPtr l, MetaPtr r);
MetaPtr mk_metaand(MetaPtr l, MetaPtr r);
MetaPtr mk_metaforallctx(std::string var, MetaPtr body);

// Expected verdict attached to a goal.
enum class Expect : std::uint8_t { Sat, Countermodel, BoundedValid, Entailed };

std::string expect_to_string(Expect e);

struct Definition {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  CharPtr body;
  bool reconstructed = false;  // body restored from secondary sources
  int line = 0, col = 0;

  Sort declared_sort() const;  // params folded into an arrow sort, body is M
};

struct Goal {
  std::string name;
  MetaPtr formula;
  Expect expect = Expect::BoundedValid;
  Scope scope{1, 1, 2};
  // Axiom subset this goal is checked under; empty optional = all axioms.
  std::optional<std::vector<std::string>> uses;
  std::string anchor;  // stable tag tying the entry to its source result
  int line = 0, col = 0;
};

struct Theory {
  SortAliases aliases;
  Signature signature;
  std::vector<Definition> definitions;
  std::vector<std::pair<std::string, MetaPtr>> axioms;
  std::vector<Goal> goals;

  const Definition* find_definition(const std::string& name) const;
  const MetaPtr* find_axiom(const std::string& name) const;
  const Goal* find_goal(const std::string& name) const;
};

// Structural equality, binder names included (used by round-trip tests).
bool ast_equal(const CharPtr& x, const CharPtr& y);
bool ast_equal(const MetaPtr& x, const MetaPtr& y);

// Equality modulo renaming of bound variables.
bool alpha_equal(const CharPtr& x, const CharPtr& y);

// Free variables of a formula, sorted by name.
std::set<std::string> free_vars(const CharPtr& f);
std::set<std::string> free_vars(const MetaPtr& m);

// Precedence-aware rendering; parse(print(t)) is AST-identical.
std::string print_char(const CharPtr& f);
std::string print_meta(const MetaPtr& m);
std::string print_theory(const Theory& t);

}  // namespace deonmf
