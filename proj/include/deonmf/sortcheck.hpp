#pragma once

// Sort checking, capture-avoiding substitution and definition expansion.

#include <map>

#include "deonmf/ast.hpp"
#include "deonmf/errors.hpp"

namespace deonmf {

// A theory that passed checking, with a sort recorded for every subterm.
struct SortedTheory {
  Theory theory;
  std::map<const CharNode*, Sort> node_sorts;

  const Sort& sort_of(const CharPtr& f) const;
};

// Validates the whole theory: every subterm gets a sort, applications match
// their domains, definitions are acyclic and fully applied, axiom and goal
// bodies have sort M under their validity operators, bound variable names
// stay clear of constants.  Throws the SortError family or DuplicateName.
SortedTheory sort_check(Theory t);

// Capture-avoiding substitution of `repl` for free occurrences of `var`.
// Binders that would capture free variables of `repl` are renamed with a
// counter-generated fresh name.
CharPtr substitute(const CharPtr& f, const std::string& var,
                   const CharPtr& repl);
MetaPtr substitute(const MetaPtr& m, const std::string& var,
                   const CharPtr& repl);

// Replaces every fully-applied definition occurrence by its instantiated
// body, innermost definitions first.  The result mentions signature
// constants only.
CharPtr expand_defs(const Theory& t, const CharPtr& f);
MetaPtr expand_defs(const Theory& t, const MetaPtr& m);

}  // namespace deonmf
