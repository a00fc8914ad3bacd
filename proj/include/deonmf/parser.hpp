#pragma once

// Reader for the theory file format (.dl).  Keyword-led blocks declare sort
// aliases, constants, definitions, axioms and goals; formulas use an infix
// grammar with an S-expression fallback for deeply nested connectives.
// docs/grammar.ebnf holds the full grammar.

#include <string>
#include <string_view>

#include "deonmf/ast.hpp"
#include "deonmf/errors.hpp"

namespace deonmf {

// Parses a complete theory.  Throws ParseError / DuplicateName / UnknownSort.
// Names are resolved lexically: identifiers bound by an enclosing
// forall/exists/forallctx or definition parameter become variables,
// everything else a constant.  Sort checking is a separate pass.
Theory parse_theory(std::string_view text);

Theory parse_theory_file(const std::string& path);

// Parses "c=I,e=J,w=K" (any order, all three required).
Scope parse_scope_string(const std::string& text);

}  // namespace deonmf
