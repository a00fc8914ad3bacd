#pragma once

// Sort system for the two-dimensional deontic language.
//
// Base sorts:  W (worlds), C (contexts), E (individuals), Prop (truth values).
// Function sorts are right-nested arrows.  Three aliases are built in:
//   WO = W -> Prop        (an intension: a set of worlds)
//   M  = C -> WO          (a character: context-indexed intension)
//   P  = E -> M           (a property of individuals)

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace deonmf {

class Sort {
 public:
  enum class Base : std::uint8_t { W, C, E, Prop };

  // Base-sort constructors.
  static Sort w() { return Sort(Base::W); }
  static Sort c() { return Sort(Base::C); }
  static Sort e() { return Sort(Base::E); }
  static Sort prop() { return Sort(Base::Prop); }
  static Sort fun(Sort dom, Sort cod);

  // Built-in aliases, fully expanded.
  static Sort wo() { return fun(w(), prop()); }
  static Sort m() { return fun(c(), wo()); }
  static Sort p() { return fun(e(), m()); }

  bool is_base() const { return base_.has_value(); }
  bool is_fun() const { return fun_ != nullptr; }
  Base base() const;
  const Sort& domain() const;
  const Sort& codomain() const;

  bool operator==(const Sort& o) const;
  bool operator!=(const Sort& o) const { return !(*this == o); }
  bool operator<(const Sort& o) const;  // total order, usable as map key

  // Renders with alias sugar: Fun(C, Fun(W, Prop)) prints as "M".
  std::string to_string() const;

 private:
  explicit Sort(Base b) : base_(b) {}
  Sort() = default;

  std::optional<Base> base_;
  std::shared_ptr<const std::pair<Sort, Sort>> fun_;
};

// Declaration-ordered constant table.  The Kaplanian built-ins
// Agent : C -> E and World : C -> W are always present.
class Signature {
 public:
  Signature();

  void declare(const std::string& name, Sort s);  // throws on duplicates
  bool contains(const std::string& name) const;
  const Sort* lookup(const std::string& name) const;  // null if absent

  const std::vector<std::pair<std::string, Sort>>& entries() const {
    return entries_;
  }
  // Constants excluding the two built-ins, in declaration order.
  std::vector<std::pair<std::string, Sort>> user_entries() const;

  static const std::string kAgent;
  static const std::string kWorld;

 private:
  std::vector<std::pair<std::string, Sort>> entries_;
};

// Sort alias table; define-before-use keeps expansion terminating and
// idempotent (recursive aliases are impossible by construction).
class SortAliases {
 public:
  SortAliases();  // seeds W, C, E, Prop, WO, M, P

  void define(const std::string& name, Sort s);  // throws on duplicates
  const Sort* lookup(const std::string& name) const;

  // User-defined aliases in definition order (built-ins excluded).
  const std::vector<std::pair<std::string, Sort>>& user_aliases() const {
    return user_;
  }

 private:
  std::vector<std::pair<std::string, Sort>> all_;
  std::vector<std::pair<std::string, Sort>> user_;
};

}  // namespace deonmf
