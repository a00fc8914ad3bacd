#include "deonmf/semantics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "deonmf/sortcheck.hpp"

namespace deonmf {

namespace {

std::uint64_t checked_pow2(std::uint64_t bits, std::uint64_t budget,
                           const char* what) {
  if (bits >= 63 || (1ull << bits) > budget) {
    throw ScopeTooLarge(std::string(what) +
                        " universe needs 2^" + std::to_string(bits) +
                        " values, over the cell budget of " +
                        std::to_string(budget));
  }
  return 1ull << bits;
}

}  // namespace

std::uint64_t universe_size(const Sort& s, const Scope& scope,
                            std::uint64_t cell_budget) {
  if (s == Sort::e()) return static_cast<std::uint64_t>(scope.ne);
  if (s == Sort::c()) return static_cast<std::uint64_t>(scope.nc);
  if (s == Sort::w()) return static_cast<std::uint64_t>(scope.nw);
  std::uint64_t cells = static_cast<std::uint64_t>(scope.nc) * scope.nw;
  if (s == Sort::m()) return checked_pow2(cells, cell_budget, "M");
  if (s == Sort::p()) {
    return checked_pow2(cells * scope.ne, cell_budget, "P");
  }
  throw UnsupportedSort("sort " + s.to_string() +
                        " has no finite value universe");
}

std::vector<std::uint64_t> value_universe(const Sort& s, const Scope& scope,
                                          std::uint64_t cell_budget) {
  std::uint64_t n = universe_size(s, scope, cell_budget);
  std::vector<std::uint64_t> out(n);
  std::iota(out.begin(), out.end(), 0ull);
  return out;
}

const std::vector<std::string>& ConditionSet::names() {
  static const std::vector<std::string> n = {
      "C-avpv",       "sem_5ab",       "sem-nonempty-av", "sem-pv-refl",
      "sem-ob-ext",   "sem-ob-closure", "sem-ob-up",      "sem-ob-down"};
  return n;
}

bool ConditionSet::get(const std::string& name) const {
  if (name == "C-avpv") return c_avpv;
  if (name == "sem_5ab") return sem_5ab;
  if (name == "sem-nonempty-av") return nonempty_av;
  if (name == "sem-pv-refl") return pv_refl;
  if (name == "sem-ob-ext") return ob_ext;
  if (name == "sem-ob-closure") return ob_closure;
  if (name == "sem-ob-up") return ob_up;
  if (name == "sem-ob-down") return ob_down;
  throw std::invalid_argument("unknown frame condition: " + name);
}

void ConditionSet::set(const std::string& name, bool value) {
  if (name == "C-avpv") {
    c_avpv = value;
  } else if (name == "sem_5ab") {
    sem_5ab = value;
  } else if (name == "sem-nonempty-av") {
    nonempty_av = value;
  } else if (name == "sem-pv-refl") {
    pv_refl = value;
  } else if (name == "sem-ob-ext") {
    ob_ext = value;
  } else if (name == "sem-ob-closure") {
    ob_closure = value;
  } else if (name == "sem-ob-up") {
    ob_up = value;
  } else if (name == "sem-ob-down") {
    ob_down = value;
  } else {
    throw std::invalid_argument("unknown frame condition: " + name);
  }
}

std::vector<std::string> ConditionSet::active() const {
  std::vector<std::string> out;
  for (const auto& n : names()) {
    if (get(n)) out.push_back(n);
  }
  return out;
}

ConditionSet ConditionSet::all_disabled() {
  ConditionSet cs;
  for (const auto& n : names()) cs.set(n, false);
  return cs;
}

Frame Frame::empty(const Scope& s) {
  if (s.nw > 6) {
    throw ScopeTooLarge(
        "frames support at most 6 worlds (the conditional obligation "
        "relation is stored as 64-bit rows over world sets)");
  }
  Frame f;
  f.scope = s;
  f.av.assign(s.nw, 0);
  f.pv.assign(s.nw, 0);
  f.ob.assign(std::size_t(1) << s.nw, 0);
  f.world_of.assign(s.nc, 0);
  f.agent_of.assign(s.nc, 0);
  return f;
}

namespace {

std::string world_set_str(std::uint64_t mask, int nw) {
  std::string out = "{";
  bool first = true;
  for (int w = 0; w < nw; ++w) {
    if (mask >> w & 1) {
      if (!first) out += ",";
      out += "w" + std::to_string(w + 1);
      first = false;
    }
  }
  return out + "}";
}

}  // namespace

std::vector<Violation> frame_conditions_check(const Frame& f,
                                              const ConditionSet& cs) {
  std::vector<Violation> out;
  const int nw = f.scope.nw;
  const std::uint64_t nsub = 1ull << nw;
  auto in_ob = [&](std::uint64_t x, std::uint64_t y) {
    return (f.ob[x] >> y & 1) != 0;
  };
  for (int w = 0; w < nw; ++w) {
    if (cs.c_avpv && (f.av[w] & ~f.pv[w]) != 0) {
      out.push_back({"C-avpv", "av(w" + std::to_string(w + 1) +
                                   ") = " + world_set_str(f.av[w], nw) +
                                   " is not within pv(w" +
                                   std::to_string(w + 1) +
                                   ") = " + world_set_str(f.pv[w], nw)});
    }
    if (cs.nonempty_av && f.av[w] == 0) {
      out.push_back(
          {"sem-nonempty-av", "av(w" + std::to_string(w + 1) + ") is empty"});
    }
    if (cs.pv_refl && (f.pv[w] >> w & 1) == 0) {
      out.push_back({"sem-pv-refl", "w" + std::to_string(w + 1) +
                                        " is not in pv(w" +
                                        std::to_string(w + 1) + ")"});
    }
  }
  for (std::uint64_t x = 0; x < nsub; ++x) {
    for (std::uint64_t y = 0; y < nsub; ++y) {
      if (cs.sem_5ab && in_ob(x, y) && (x & y) == 0) {
        out.push_back({"sem_5ab", world_set_str(y, nw) + " in ob(" +
                                      world_set_str(x, nw) +
                                      ") but the sets are disjoint"});
      }
      if (cs.ob_ext) {
        for (std::uint64_t z = y + 1; z < nsub; ++z) {
          if ((x & y) == (x & z) && in_ob(x, y) != in_ob(x, z)) {
            out.push_back(
                {"sem-ob-ext",
                 world_set_str(y, nw) + " and " + world_set_str(z, nw) +
                     " agree inside " + world_set_str(x, nw) +
                     " but differ in ob"});
          }
        }
      }
      if (cs.ob_closure && in_ob(x, y)) {
        for (std::uint64_t z = 0; z < nsub; ++z) {
          if (in_ob(x, z) && (x & y & z) != 0 && !in_ob(x, y & z)) {
            out.push_back(
                {"sem-ob-closure",
                 "ob(" + world_set_str(x, nw) + ") holds " +
                     world_set_str(y, nw) + " and " + world_set_str(z, nw) +
                     " but not their intersection"});
          }
        }
      }
      if (cs.ob_up && in_ob(x, y) && (y & ~x) == 0) {
        for (std::uint64_t z = 0; z < nsub; ++z) {
          if ((x & ~z) == 0 && !in_ob(z, (z & ~x) | y)) {
            out.push_back(
                {"sem-ob-up",
                 world_set_str(y, nw) + " in ob(" + world_set_str(x, nw) +
                     ") does not lift to ob(" + world_set_str(z, nw) + ")"});
          }
        }
      }
      if (cs.ob_down && in_ob(x, y)) {
        // here y plays the role of the obligated set Z of the condition
        for (std::uint64_t sub = 0; sub < nsub; ++sub) {
          if ((sub & ~x) == 0 && (sub & y) != 0 && !in_ob(sub, y)) {
            out.push_back(
                {"sem-ob-down",
                 world_set_str(y, nw) + " in ob(" + world_set_str(x, nw) +
                     ") does not restrict to ob(" + world_set_str(sub, nw) +
                     ")"});
          }
        }
      }
    }
  }
  return out;
}

bool frame_ok(const Frame& f, const ConditionSet& cs) {
  const int nw = f.scope.nw;
  const std::uint64_t nsub = 1ull << nw;
  for (int w = 0; w < nw; ++w) {
    if (cs.c_avpv && (f.av[w] & ~f.pv[w]) != 0) return false;
    if (cs.nonempty_av && f.av[w] == 0) return false;
    if (cs.pv_refl && (f.pv[w] >> w & 1) == 0) return false;
  }
  auto in_ob = [&](std::uint64_t x, std::uint64_t y) {
    return (f.ob[x] >> y & 1) != 0;
  };
  for (std::uint64_t x = 0; x < nsub; ++x) {
    if (f.ob[x] == 0 && !cs.ob_ext) continue;
    for (std::uint64_t y = 0; y < nsub; ++y) {
      if (cs.sem_5ab && in_ob(x, y) && (x & y) == 0) return false;
      if (cs.ob_ext) {
        for (std::uint64_t z = y + 1; z < nsub; ++z) {
          if ((x & y) == (x & z) && in_ob(x, y) != in_ob(x, z)) return false;
        }
      }
      if (!in_ob(x, y)) continue;
      if (cs.ob_closure) {
        for (std::uint64_t z = 0; z < nsub; ++z) {
          if (in_ob(x, z) && (x & y & z) != 0 && !in_ob(x, y & z)) {
            return false;
          }
        }
      }
      if (cs.ob_up && (y & ~x) == 0) {
        for (std::uint64_t z = 0; z < nsub; ++z) {
          if ((x & ~z) == 0 && !in_ob(z, (z & ~x) | y)) return false;
        }
      }
      if (cs.ob_down) {
        for (std::uint64_t sub = 0; sub < nsub; ++sub) {
          if ((sub & ~x) == 0 && (sub & y) != 0 && !in_ob(sub, y)) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

std::uint64_t Table::tuple_count() const {
  std::uint64_t n = 1;
  for (auto s : arg_sizes) n *= s;
  return n;
}

std::uint64_t Table::flat_index(const std::vector<std::uint64_t>& args) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < arg_sizes.size(); ++i) {
    idx = idx * arg_sizes[i] + args[i];
  }
  return idx;
}

TableShape table_shape(const std::string& name, const Sort& s) {
  TableShape shape;
  Sort rest = s;
  while (true) {
    if (rest == Sort::m()) {
      shape.result = Sort::m();
      return shape;
    }
    if (rest.is_base()) {
      if (rest == Sort::prop()) {
        throw UnsupportedSort("constant " + name +
                              " has sort Prop, which has no table form");
      }
      if (!shape.arg_sorts.empty()) {
        throw UnsupportedSort("constant " + name + " returns " +
                              rest.to_string() +
                              "; only M-valued applied constants are "
                              "interpretable");
      }
      shape.result = rest;
      return shape;
    }
    Sort dom = rest.domain();
    bool ok = dom == Sort::e() || dom == Sort::c() || dom == Sort::w() ||
              dom == Sort::m() || dom == Sort::p();
    if (!ok) {
      throw UnsupportedSort("constant " + name + " takes an argument of sort " +
                            dom.to_string() +
                            ", which has no finite value universe");
    }
    shape.arg_sorts.push_back(dom);
    rest = rest.codomain();
  }
}

Table make_table(const std::string& name, const Sort& s, const Scope& scope,
                 std::uint64_t cell_budget) {
  TableShape shape = table_shape(name, s);
  Table t;
  t.arg_sorts = shape.arg_sorts;
  t.result = shape.result;
  std::uint64_t tuples = 1;
  for (const Sort& as : t.arg_sorts) {
    std::uint64_t n = universe_size(as, scope, cell_budget);
    t.arg_sizes.push_back(n);
    if (tuples > cell_budget / std::max<std::uint64_t>(n, 1)) {
      throw ScopeTooLarge("table for " + name + " exceeds the cell budget");
    }
    tuples *= n;
  }
  t.cells.assign(tuples, 0);
  return t;
}

const Table* Interpretation::table(const std::string& name) const {
  for (const auto& [n, t] : tables) {
    if (n == name) return &t;
  }
  return nullptr;
}

Table* Interpretation::table(const std::string& name) {
  for (auto& [n, t] : tables) {
    if (n == name) return &t;
  }
  return nullptr;
}

Interpretation make_interpretation(const Signature& sig, const Scope& scope,
                                   std::uint64_t cell_budget) {
  Interpretation I;
  I.scope = scope;
  I.frame = Frame::empty(scope);
  for (const auto& [name, sort] : sig.user_entries()) {
    I.tables.emplace_back(name, make_table(name, sort, scope, cell_budget));
  }
  return I;
}

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(const Theory& theory, const Interpretation& interp)
    : theory_(theory),
      interp_(interp),
      nc_(interp.scope.nc),
      ne_(interp.scope.ne),
      nw_(interp.scope.nw) {}

bool Evaluator::is_closed(const CharPtr& f) {
  auto it = closed_.find(f.get());
  if (it != closed_.end()) return it->second;
  bool c = free_vars(f).empty();
  closed_.emplace(f.get(), c);
  return c;
}

CharPtr Evaluator::expanded(const CharPtr& f) {
  auto it = expand_cache_.find(f.get());
  if (it != expand_cache_.end()) return it->second;
  CharPtr e = expand_defs(theory_, f);
  expand_cache_.emplace(f.get(), e);
  return e;
}

bool Evaluator::eval_char(const CharPtr& f, int c, int w) {
  Env env;
  return eval(expanded(f), env, c, w);
}

bool Evaluator::eval_meta(const MetaPtr& m) {
  Env env;
  return eval(m, env);
}

bool Evaluator::eval(const MetaPtr& m, Env& env) {
  switch (m->kind) {
    case MetaKind::Valid: {
      CharPtr f = expanded(m->formula);
      for (int c = 0; c < nc_; ++c) {
        for (int w = 0; w < nw_; ++w) {
          if (!eval(f, env, c, w)) return false;
        }
      }
      return true;
    }
    case MetaKind::ValidD: {
      CharPtr f = expanded(m->formula);
      for (int c = 0; c < nc_; ++c) {
        if (!eval(f, env, c, interp_.frame.world_of[c])) return false;
      }
      return true;
    }
    case MetaKind::ValidCtx: {
      int c = static_cast<int>(term_value(expanded(m->ctx), env).v);
      CharPtr f = expanded(m->formula);
      for (int w = 0; w < nw_; ++w) {
        if (!eval(f, env, c, w)) return false;
      }
      return true;
    }
    case MetaKind::AtCtx: {
      int c = static_cast<int>(term_value(expanded(m->ctx), env).v);
      return eval(expanded(m->formula), env, c, interp_.frame.world_of[c]);
    }
    case MetaKind::MetaImp:
      return !eval(m->l, env) || eval(m->r, env);
    case MetaKind::MetaAnd:
      return eval(m->l, env) && eval(m->r, env);
    case MetaKind::MetaForallCtx: {
      for (int c = 0; c < nc_; ++c) {
        env.emplace_back(m->var, Value{static_cast<std::uint64_t>(c)});
        bool ok = eval(m->l, env);
        env.pop_back();
        if (!ok) return false;
      }
      return true;
    }
  }
  throw std::logic_error("eval: unhandled meta kind");
}

std::uint64_t Evaluator::content_at(const CharPtr& f, Env& env, int c) {
  std::uint64_t mask = 0;
  for (int w = 0; w < nw_; ++w) {
    if (eval(f, env, c, w)) mask |= 1ull << w;
  }
  return mask;
}

bool Evaluator::eval(const CharPtr& f, Env& env, int c, int w) {
  const bool closed = is_closed(f);
  std::uint64_t memo_key = 0;
  if (closed) {
    memo_key =
        (reinterpret_cast<std::uintptr_t>(f.get()) << 12) ^
        static_cast<std::uint64_t>(c * nw_ + w);
    // Collision-free key: the point index occupies the low bits and node
    // addresses are at least 16-byte aligned, so shifting keeps them apart.
    auto it = memo_.find(memo_key);
    if (it != memo_.end()) return it->second;
  }
  bool result;
  switch (f->kind) {
    case CharKind::Top: result = true; break;
    case CharKind::Bottom: result = false; break;
    case CharKind::Not: result = !eval(f->a, env, c, w); break;
    case CharKind::And:
      result = eval(f->a, env, c, w) && eval(f->b, env, c, w);
      break;
    case CharKind::Or:
      result = eval(f->a, env, c, w) || eval(f->b, env, c, w);
      break;
    case CharKind::Imp:
      result = !eval(f->a, env, c, w) || eval(f->b, env, c, w);
      break;
    case CharKind::Iff:
      result = eval(f->a, env, c, w) == eval(f->b, env, c, w);
      break;
    case CharKind::BoxA:
    case CharKind::DiaA:
    case CharKind::BoxP:
    case CharKind::DiaP: {
      bool universal = f->kind == CharKind::BoxA || f->kind == CharKind::BoxP;
      WorldSet reach = (f->kind == CharKind::BoxA || f->kind == CharKind::DiaA)
                           ? interp_.frame.av[w]
                           : interp_.frame.pv[w];
      result = universal;
      for (int v = 0; v < nw_; ++v) {
        if ((reach >> v & 1) == 0) continue;
        bool b = eval(f->a, env, c, v);
        if (universal && !b) {
          result = false;
          break;
        }
        if (!universal && b) {
          result = true;
          break;
        }
      }
      break;
    }
    case CharKind::BoxD: {
      if (closed) {
        auto it = validd_memo_.find(f.get());
        if (it != validd_memo_.end()) {
          result = it->second;
          break;
        }
      }
      result = true;
      for (int cc = 0; cc < nc_; ++cc) {
        if (!eval(f->a, env, cc, interp_.frame.world_of[cc])) {
          result = false;
          break;
        }
      }
      if (closed) validd_memo_.emplace(f.get(), result);
      break;
    }
    case CharKind::ObDyadic: {
      std::uint64_t x = content_at(f->b, env, c);
      std::uint64_t y = content_at(f->a, env, c);
      result = (interp_.frame.ob[x] >> y & 1) != 0;
      break;
    }
    case CharKind::ObA:
    case CharKind::ObI: {
      WorldSet x = f->kind == CharKind::ObA ? interp_.frame.av[w]
                                            : interp_.frame.pv[w];
      std::uint64_t y = content_at(f->a, env, c);
      result = (interp_.frame.ob[x] >> y & 1) != 0 && (x & ~y) != 0;
      break;
    }
    case CharKind::Forall:
    case CharKind::Exists: {
      bool universal = f->kind == CharKind::Forall;
      std::uint64_t n = universe_size(*f->binder, interp_.scope);
      result = universal;
      for (std::uint64_t v = 0; v < n; ++v) {
        env.emplace_back(f->name, Value{v});
        bool b = eval(f->a, env, c, w);
        env.pop_back();
        if (universal && !b) {
          result = false;
          break;
        }
        if (!universal && b) {
          result = true;
          break;
        }
      }
      break;
    }
    case CharKind::Const:
    case CharKind::Var:
    case CharKind::Elem:
    case CharKind::App: {
      Value v = term_value(f, env);
      result = (v.v >> (c * nw_ + w) & 1) != 0;
      break;
    }
    default:
      throw std::logic_error("eval: unhandled node kind");
  }
  if (closed) memo_.emplace(memo_key, result);
  return result;
}

Evaluator::Value Evaluator::term_value(const CharPtr& t, Env& env) {
  switch (t->kind) {
    case CharKind::Elem:
      return Value{t->elem};
    case CharKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == t->name) return it->second;
      }
      throw std::logic_error("term_value: unbound variable " + t->name);
    }
    case CharKind::Top:
      return Value{(1ull << (nc_ * nw_)) - 1};
    case CharKind::Bottom:
      return Value{0};
    case CharKind::Const: {
      const Sort* s = theory_.signature.lookup(t->name);
      if (s == nullptr) {
        throw UnboundVariable(t->name, t->line, t->col);
      }
      const Table* tab = interp_.table(t->name);
      if (tab == nullptr) {
        throw std::logic_error("no table for constant " + t->name);
      }
      if (tab->arg_sorts.empty()) return Value{tab->cells[0]};
      if (*s == Sort::p()) {
        // Pack the property value: one M mask per individual.
        std::uint64_t packed = 0;
        for (int e = 0; e < ne_; ++e) {
          packed |= tab->cells[e] << (e * nc_ * nw_);
        }
        return Value{packed};
      }
      throw UnsupportedSort("constant " + t->name +
                            " cannot be used as a value of sort " +
                            s->to_string());
    }
    case CharKind::App: {
      std::vector<CharPtr> args;
      CharPtr head = t;
      while (head->kind == CharKind::App) {
        args.push_back(head->b);
        head = head->a;
      }
      std::reverse(args.begin(), args.end());
      if (head->kind == CharKind::Const &&
          head->name == Signature::kAgent) {
        int c = static_cast<int>(term_value(args.at(0), env).v);
        return Value{
            static_cast<std::uint64_t>(interp_.frame.agent_of[c])};
      }
      if (head->kind == CharKind::Const &&
          head->name == Signature::kWorld) {
        int c = static_cast<int>(term_value(args.at(0), env).v);
        return Value{
            static_cast<std::uint64_t>(interp_.frame.world_of[c])};
      }
      if (head->kind == CharKind::Var || head->kind == CharKind::Elem) {
        // Property value applied to an individual: extract the M block.
        Value pv = term_value(head, env);
        if (args.size() != 1) {
          throw UnsupportedSort("unsupported application shape in evaluation");
        }
        std::uint64_t e = term_value(args[0], env).v;
        std::uint64_t stride = static_cast<std::uint64_t>(nc_) * nw_;
        return Value{(pv.v >> (e * stride)) & ((1ull << stride) - 1)};
      }
      if (head->kind != CharKind::Const) {
        throw UnsupportedSort("unsupported application head in evaluation");
      }
      const Table* tab = interp_.table(head->name);
      if (tab == nullptr) {
        throw UnboundVariable(head->name, head->line, head->col);
      }
      if (args.size() != tab->arg_sorts.size()) {
        // Partial application of a tabled constant as a value: only
        // property-sorted prefixes are representable, handled by callers
        // through the Const case.  Anything else has no finite encoding.
        throw UnsupportedSort("constant " + head->name +
                              " is partially applied");
      }
      std::vector<std::uint64_t> vals(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (tab->arg_sorts[i] == Sort::m()) {
          // An M argument may be an arbitrary formula: take its full
          // character value.
          vals[i] = m_value_of(args[i], env);
        } else {
          vals[i] = term_value(args[i], env).v;
        }
      }
      return Value{tab->cells[tab->flat_index(vals)]};
    }
    default: {
      // A composite formula used as an M value.
      return Value{m_value_of(t, env)};
    }
  }
}

// Full character value of an M-sorted term: truth at every (context, world).
std::uint64_t Evaluator::m_value_of(const CharPtr& f, Env& env) {
  switch (f->kind) {
    case CharKind::Elem:
      return f->elem;
    case CharKind::Var:
      return term_value(f, env).v;
    default: {
      std::uint64_t mask = 0;
      for (int c = 0; c < nc_; ++c) {
        for (int w = 0; w < nw_; ++w) {
          if (eval(f, env, c, w)) mask |= 1ull << (c * nw_ + w);
        }
      }
      return mask;
    }
  }
}

bool eval_char(const Theory& t, const Interpretation& I, const CharPtr& f,
               int c, int w) {
  Evaluator ev(t, I);
  return ev.eval_char(f, c, w);
}

bool eval_meta(const Theory& t, const Interpretation& I, const MetaPtr& m) {
  Evaluator ev(t, I);
  return ev.eval_meta(m);
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

std::uint64_t map_world_set(std::uint64_t mask, const std::vector<int>& pw) {
  std::uint64_t out = 0;
  for (std::size_t w = 0; w < pw.size(); ++w) {
    if (mask >> w & 1) out |= 1ull << pw[w];
  }
  return out;
}

std::uint64_t map_m_value(std::uint64_t mask, const std::vector<int>& pw,
                          const std::vector<int>& pc, int nw) {
  std::uint64_t out = 0;
  for (std::size_t c = 0; c < pc.size(); ++c) {
    for (int w = 0; w < nw; ++w) {
      if (mask >> (c * nw + w) & 1) {
        out |= 1ull << (pc[c] * nw + pw[w]);
      }
    }
  }
  return out;
}

std::uint64_t map_p_value(std::uint64_t packed, const std::vector<int>& pw,
                          const std::vector<int>& pc,
                          const std::vector<int>& pe, int nc, int nw) {
  std::uint64_t stride = static_cast<std::uint64_t>(nc) * nw;
  std::uint64_t out = 0;
  for (std::size_t e = 0; e < pe.size(); ++e) {
    std::uint64_t block = (packed >> (e * stride)) & ((1ull << stride) - 1);
    out |= map_m_value(block, pw, pc, nw) << (pe[e] * stride);
  }
  return out;
}

}  // namespace

Interpretation apply_renaming(const Interpretation& I,
                              const std::vector<int>& perm_w,
                              const std::vector<int>& perm_c,
                              const std::vector<int>& perm_e) {
  const int nc = I.scope.nc, nw = I.scope.nw;
  Interpretation out = I;
  for (int w = 0; w < nw; ++w) {
    out.frame.av[perm_w[w]] = map_world_set(I.frame.av[w], perm_w);
    out.frame.pv[perm_w[w]] = map_world_set(I.frame.pv[w], perm_w);
  }
  const std::uint64_t nsub = 1ull << nw;
  for (std::uint64_t x = 0; x < nsub; ++x) {
    std::uint64_t nx = map_world_set(x, perm_w);
    std::uint64_t row = 0;
    for (std::uint64_t y = 0; y < nsub; ++y) {
      if (I.frame.ob[x] >> y & 1) row |= 1ull << map_world_set(y, perm_w);
    }
    out.frame.ob[nx] = row;
  }
  for (int c = 0; c < nc; ++c) {
    out.frame.world_of[perm_c[c]] = perm_w[I.frame.world_of[c]];
    out.frame.agent_of[perm_c[c]] = perm_e[I.frame.agent_of[c]];
  }
  for (std::size_t ti = 0; ti < I.tables.size(); ++ti) {
    const Table& told = I.tables[ti].second;
    Table& tnew = out.tables[ti].second;
    std::uint64_t tuples = told.tuple_count();
    std::vector<std::uint64_t> args(told.arg_sorts.size());
    for (std::uint64_t flat = 0; flat < tuples; ++flat) {
      std::uint64_t rem = flat;
      for (std::size_t i = told.arg_sorts.size(); i-- > 0;) {
        args[i] = rem % told.arg_sizes[i];
        rem /= told.arg_sizes[i];
      }
      std::vector<std::uint64_t> nargs(args);
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Sort& s = told.arg_sorts[i];
        if (s == Sort::e()) {
          nargs[i] = perm_e[args[i]];
        } else if (s == Sort::c()) {
          nargs[i] = perm_c[args[i]];
        } else if (s == Sort::w()) {
          nargs[i] = perm_w[args[i]];
        } else if (s == Sort::m()) {
          nargs[i] = map_m_value(args[i], perm_w, perm_c, nw);
        } else {
          nargs[i] = map_p_value(args[i], perm_w, perm_c, perm_e, nc, nw);
        }
      }
      std::uint64_t cell = told.cells[flat];
      std::uint64_t ncell;
      if (told.result == Sort::m()) {
        ncell = map_m_value(cell, perm_w, perm_c, nw);
      } else if (told.result == Sort::e()) {
        ncell = perm_e[cell];
      } else if (told.result == Sort::c()) {
        ncell = perm_c[cell];
      } else {
        ncell = perm_w[cell];
      }
      tnew.cells[tnew.flat_index(nargs)] = ncell;
    }
  }
  return out;
}

std::string serialize_interpretation(const Interpretation& I) {
  std::ostringstream os;
  os << I.scope.nc << ' ' << I.scope.ne << ' ' << I.scope.nw << '|';
  for (auto v : I.frame.av) os << v << ' ';
  os << '|';
  for (auto v : I.frame.pv) os << v << ' ';
  os << '|';
  for (auto v : I.frame.ob) os << v << ' ';
  os << '|';
  for (auto v : I.frame.world_of) os << v << ' ';
  os << '|';
  for (auto v : I.frame.agent_of) os << v << ' ';
  for (const auto& [name, tab] : I.tables) {
    os << '|' << name << ':';
    for (auto cell : tab.cells) os << cell << ' ';
  }
  return os.str();
}

Interpretation canonical_form(const Interpretation& I) {
  const int nc = I.scope.nc, ne = I.scope.ne, nw = I.scope.nw;
  auto factorial = [](int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  if (factorial(nc) * factorial(ne) * factorial(nw) > 1000000) {
    throw ScopeTooLarge("canonicalization over this scope's renaming group");
  }
  std::vector<int> pw(nw), pc(nc), pe(ne);
  std::iota(pw.begin(), pw.end(), 0);
  std::optional<std::string> best;
  Interpretation best_interp = I;
  do {
    std::iota(pc.begin(), pc.end(), 0);
    do {
      std::iota(pe.begin(), pe.end(), 0);
      do {
        Interpretation cand = apply_renaming(I, pw, pc, pe);
        std::string ser = serialize_interpretation(cand);
        if (!best || ser < *best) {
          best = std::move(ser);
          best_interp = std::move(cand);
        }
      } while (std::next_permutation(pe.begin(), pe.end()));
    } while (std::next_permutation(pc.begin(), pc.end()));
  } while (std::next_permutation(pw.begin(), pw.end()));
  return best_interp;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string m_value_str(std::uint64_t mask, int nc, int nw) {
  std::string out = "{";
  bool first = true;
  for (int c = 0; c < nc; ++c) {
    for (int w = 0; w < nw; ++w) {
      if (mask >> (c * nw + w) & 1) {
        if (!first) out += ",";
        out += "(c" + std::to_string(c + 1) + ",w" + std::to_string(w + 1) +
               ")";
        first = false;
      }
    }
  }
  return out + "}";
}

std::string value_str(const Sort& s, std::uint64_t v, const Scope& sc) {
  if (s == Sort::e()) return "e" + std::to_string(v + 1);
  if (s == Sort::c()) return "c" + std::to_string(v + 1);
  if (s == Sort::w()) return "w" + std::to_string(v + 1);
  if (s == Sort::m()) return m_value_str(v, sc.nc, sc.nw);
  // property: one block per individual
  std::uint64_t stride = static_cast<std::uint64_t>(sc.nc) * sc.nw;
  std::string out = "[";
  for (int e = 0; e < sc.ne; ++e) {
    if (e) out += " ";
    std::uint64_t block = (v >> (e * stride)) & ((1ull << stride) - 1);
    out += "e" + std::to_string(e + 1) + "->" +
           m_value_str(block, sc.nc, sc.nw);
  }
  return out + "]";
}

}  // namespace

std::string render_model_text(const Interpretation& I) {
  const int nc = I.scope.nc, nw = I.scope.nw;
  std::ostringstream os;
  os << "scope: " << I.scope.to_string() << '\n';
  os << "av:";
  for (int w = 0; w < nw; ++w) {
    os << (w ? "; " : " ") << 'w' << w + 1 << " -> "
       << world_set_str(I.frame.av[w], nw);
  }
  os << "\npv:";
  for (int w = 0; w < nw; ++w) {
    os << (w ? "; " : " ") << 'w' << w + 1 << " -> "
       << world_set_str(I.frame.pv[w], nw);
  }
  os << "\nob:";
  bool any = false;
  for (std::uint64_t x = 0; x < (1ull << nw); ++x) {
    for (std::uint64_t y = 0; y < (1ull << nw); ++y) {
      if (I.frame.ob[x] >> y & 1) {
        os << (any ? "; " : " ") << world_set_str(y, nw) << " in ob("
           << world_set_str(x, nw) << ")";
        any = true;
      }
    }
  }
  if (!any) os << " (empty)";
  os << "\nworld:";
  for (int c = 0; c < nc; ++c) {
    os << (c ? "; " : " ") << 'c' << c + 1 << " -> w"
       << I.frame.world_of[c] + 1;
  }
  os << "\nagent:";
  for (int c = 0; c < nc; ++c) {
    os << (c ? "; " : " ") << 'c' << c + 1 << " -> e"
       << I.frame.agent_of[c] + 1;
  }
  os << '\n';
  for (const auto& [name, tab] : I.tables) {
    os << "const " << name << ":\n";
    std::uint64_t tuples = tab.tuple_count();
    std::vector<std::uint64_t> args(tab.arg_sorts.size());
    for (std::uint64_t flat = 0; flat < tuples; ++flat) {
      std::uint64_t rem = flat;
      for (std::size_t i = tab.arg_sorts.size(); i-- > 0;) {
        args[i] = rem % tab.arg_sizes[i];
        rem /= tab.arg_sizes[i];
      }
      os << "  " << name;
      if (!args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (i) os << ", ";
          os << value_str(tab.arg_sorts[i], args[i], I.scope);
        }
        os << ')';
      }
      os << " = " << value_str(tab.result, tab.cells[flat], I.scope) << '\n';
    }
  }
  return os.str();
}

std::string render_model_json(const Interpretation& I, int indent) {
  nlohmann::ordered_json j;
  j["scope"] = {{"c", I.scope.nc}, {"e", I.scope.ne}, {"w", I.scope.nw}};
  auto set_to_array = [&](std::uint64_t mask, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) out.push_back(i);
    }
    return out;
  };
  const int nw = I.scope.nw;
  nlohmann::ordered_json av = nlohmann::ordered_json::array();
  nlohmann::ordered_json pv = nlohmann::ordered_json::array();
  for (int w = 0; w < nw; ++w) {
    av.push_back(set_to_array(I.frame.av[w], nw));
    pv.push_back(set_to_array(I.frame.pv[w], nw));
  }
  j["av"] = av;
  j["pv"] = pv;
  nlohmann::ordered_json ob = nlohmann::ordered_json::array();
  for (std::uint64_t x = 0; x < (1ull << nw); ++x) {
    nlohmann::ordered_json entry;
    entry["condition"] = set_to_array(x, nw);
    nlohmann::ordered_json ys = nlohmann::ordered_json::array();
    for (std::uint64_t y = 0; y < (1ull << nw); ++y) {
      if (I.frame.ob[x] >> y & 1) ys.push_back(set_to_array(y, nw));
    }
    entry["obligatory"] = ys;
    ob.push_back(entry);
  }
  j["ob"] = ob;
  j["world_of"] = I.frame.world_of;
  j["agent_of"] = I.frame.agent_of;
  nlohmann::ordered_json tables = nlohmann::ordered_json::array();
  for (const auto& [name, tab] : I.tables) {
    nlohmann::ordered_json t;
    t["name"] = name;
    nlohmann::ordered_json argsorts = nlohmann::ordered_json::array();
    for (const auto& s : tab.arg_sorts) argsorts.push_back(s.to_string());
    t["arg_sorts"] = argsorts;
    t["result"] = tab.result.to_string();
    t["cells"] = tab.cells;
    tables.push_back(t);
  }
  j["tables"] = tables;
  return j.dump(indent);
}

}  // namespace deonmf
