#include "deonmf/grounder.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "deonmf/errors.hpp"
#include "deonmf/sortcheck.hpp"

namespace deonmf {

// ---------------------------------------------------------------------------
// CnfBuilder

void CnfBuilder::add(std::vector<int> lits) {
  std::vector<int> out;
  out.reserve(lits.size());
  for (int l : lits) {
    if (l == kTrueLit) return;  // clause satisfied
    if (l == kFalseLit) continue;
    out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int l : out) {
    if (std::binary_search(out.begin(), out.end(), -l)) return;  // tautology
  }
  if (out.empty()) contradiction_ = true;
  clauses_.push_back(std::move(out));
}

int CnfBuilder::gate(int tag, std::vector<int> key,
                     const std::function<int()>& build) {
  auto it = cache_.find({tag, key});
  if (it != cache_.end()) return it->second;
  int t = build();
  cache_.emplace(std::make_pair(tag, std::move(key)), t);
  return t;
}

namespace {
constexpr int kTagAnd = 1;
constexpr int kTagIff = 2;
constexpr int kTagSel = 3;
constexpr int kTagOb = 4;
}  // namespace

int CnfBuilder::mk_and(std::vector<int> lits) {
  std::vector<int> out;
  out.reserve(lits.size());
  for (int l : lits) {
    if (l == kTrueLit) continue;
    if (l == kFalseLit) return kFalseLit;
    out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int l : out) {
    if (std::binary_search(out.begin(), out.end(), -l)) return kFalseLit;
  }
  if (out.empty()) return kTrueLit;
  if (out.size() == 1) return out[0];
  return gate(kTagAnd, out, [&] {
    int t = new_var();
    std::vector<int> big;
    big.reserve(out.size() + 1);
    big.push_back(t);
    for (int l : out) {
      add({-t, l});
      big.push_back(-l);
    }
    add(std::move(big));
    return t;
  });
}

int CnfBuilder::mk_or(std::vector<int> lits) {
  for (int& l : lits) l = -l;
  return -mk_and(std::move(lits));
}

int CnfBuilder::mk_iff(int a, int b) {
  if (a == kTrueLit) return b;
  if (a == kFalseLit) return -b;
  if (b == kTrueLit) return a;
  if (b == kFalseLit) return -a;
  if (a == b) return kTrueLit;
  if (a == -b) return kFalseLit;
  if (std::abs(a) > std::abs(b)) std::swap(a, b);
  if (a < 0) {
    a = -a;
    b = -b;
  }
  return gate(kTagIff, {a, b}, [&] {
    int t = new_var();
    add({-t, -a, b});
    add({-t, a, -b});
    add({t, a, b});
    add({t, -a, -b});
    return t;
  });
}

int CnfBuilder::selector_gate(const std::vector<int>& sels,
                              const std::vector<int>& lits) {
  bool all_same = true;
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i] != lits[0]) {
      all_same = false;
      break;
    }
  }
  if (all_same || sels.size() == 1) return lits[0];
  std::vector<int> key = sels;
  key.push_back(0);
  key.insert(key.end(), lits.begin(), lits.end());
  return gate(kTagSel, std::move(key), [&] {
    int t = new_var();
    for (std::size_t i = 0; i < sels.size(); ++i) {
      add({-sels[i], -lits[i], t});
      add({-sels[i], lits[i], -t});
    }
    return t;
  });
}

void CnfBuilder::exactly_one(const std::vector<int>& sels) {
  for (std::size_t i = 0; i < sels.size(); ++i) {
    for (std::size_t j = i + 1; j < sels.size(); ++j) {
      add({-sels[i], -sels[j]});
    }
  }
  add(sels);
}

// ---------------------------------------------------------------------------
// VarMap

const VarMap::TableVars* VarMap::find(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::size_t VarMap::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].name == name) return i;
  }
  throw std::logic_error("no table block for constant " + name);
}

namespace {

std::string mask_name(std::uint64_t m, int nw) {
  std::string s = "{";
  bool first = true;
  for (int w = 0; w < nw; ++w) {
    if (m >> w & 1) {
      if (!first) s += ",";
      s += "w" + std::to_string(w + 1);
      first = false;
    }
  }
  return s + "}";
}

}  // namespace

std::string VarMap::var_name(int v) const {
  const int nw = scope.nw, nc = scope.nc, ne = scope.ne;
  if (v >= av0 && v < av0 + nw * nw) {
    int i = v - av0;
    return "av(w" + std::to_string(i / nw + 1) + ",w" +
           std::to_string(i % nw + 1) + ")";
  }
  if (v >= pv0 && v < pv0 + nw * nw) {
    int i = v - pv0;
    return "pv(w" + std::to_string(i / nw + 1) + ",w" +
           std::to_string(i % nw + 1) + ")";
  }
  if (v >= ob0 && v < ob0 + (1 << (2 * nw))) {
    int i = v - ob0;
    std::uint64_t x = static_cast<std::uint64_t>(i) >> nw;
    std::uint64_t y = i & ((1 << nw) - 1);
    return "ob(" + mask_name(x, nw) + "," + mask_name(y, nw) + ")";
  }
  if (v >= world0 && v < world0 + nc * nw) {
    int i = v - world0;
    return "world(c" + std::to_string(i / nw + 1) + ")=w" +
           std::to_string(i % nw + 1);
  }
  if (v >= agent0 && v < agent0 + nc * ne) {
    int i = v - agent0;
    return "agent(c" + std::to_string(i / ne + 1) + ")=e" +
           std::to_string(i % ne + 1);
  }
  for (const auto& t : tables) {
    if (v >= t.base && v < t.base + t.var_count) {
      int i = v - t.base;
      if (t.result == Sort::m()) {
        int per = nc * nw;
        int tuple = i / per;
        int c = (i % per) / nw;
        int w = i % nw;
        return t.name + "[" + std::to_string(tuple) + "]@(c" +
               std::to_string(c + 1) + ",w" + std::to_string(w + 1) + ")";
      }
      return t.name + "=" + std::to_string(i);
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Grounder

Grounder::Grounder(const Theory& theory, const Scope& scope,
                   const ConditionSet& cs, std::uint64_t cell_budget)
    : theory_(theory), scope_(scope), conds_(cs), budget_(cell_budget) {
  const int nw = scope.nw, nc = scope.nc, ne = scope.ne;
  if (nw > 6) {
    throw ScopeTooLarge(
        "grounding supports at most 6 worlds (the conditional obligation "
        "relation is indexed by pairs of world sets)");
  }
  vars_.scope = scope;
  int next = 1;
  vars_.av0 = next;
  next += nw * nw;
  vars_.pv0 = next;
  next += nw * nw;
  vars_.ob0 = next;
  next += 1 << (2 * nw);
  vars_.world0 = next;
  next += nc * nw;
  vars_.agent0 = next;
  next += nc * ne;
  for (const auto& [name, sort] : theory.signature.user_entries()) {
    Table proto = make_table(name, sort, scope, cell_budget);
    VarMap::TableVars tv;
    tv.name = name;
    tv.arg_sorts = proto.arg_sorts;
    tv.arg_sizes = proto.arg_sizes;
    tv.result = proto.result;
    tv.tuple_count = proto.tuple_count();
    tv.base = next;
    if (tv.result == Sort::m()) {
      std::uint64_t vc = tv.tuple_count * nc * nw;
      if (vc > cell_budget) {
        throw ScopeTooLarge("table for " + name + " exceeds the cell budget");
      }
      tv.var_count = static_cast<int>(vc);
    } else {
      tv.var_count =
          static_cast<int>(universe_size(tv.result, scope, cell_budget));
    }
    next += tv.var_count;
    vars_.tables.push_back(std::move(tv));
  }
  vars_.core_count = next - 1;
  while (cnf_.num_vars() < vars_.core_count) cnf_.new_var();
  emit_frame_conditions();
}

void Grounder::emit_frame_conditions() {
  const int nw = scope_.nw, nc = scope_.nc, ne = scope_.ne;
  const std::uint64_t nsub = 1ull << nw;
  // Selector groups are exactly-one by construction of the intended models.
  for (int c = 0; c < nc; ++c) {
    std::vector<int> row;
    for (int w = 0; w < nw; ++w) row.push_back(vars_.world_sel(c, w));
    cnf_.exactly_one(row);
  }
  for (int c = 0; c < nc; ++c) {
    std::vector<int> row;
    for (int e = 0; e < ne; ++e) row.push_back(vars_.agent_sel(c, e));
    cnf_.exactly_one(row);
  }
  for (std::size_t ti = 0; ti < vars_.tables.size(); ++ti) {
    const auto& tv = vars_.tables[ti];
    if (tv.result == Sort::m()) continue;
    std::vector<int> row;
    for (int v = 0; v < tv.var_count; ++v) {
      row.push_back(vars_.base_sel(ti, v));
    }
    cnf_.exactly_one(row);
  }
  if (conds_.c_avpv) {
    for (int w = 0; w < nw; ++w) {
      for (int v = 0; v < nw; ++v) {
        cnf_.add({-vars_.av(w, v), vars_.pv(w, v)});
      }
    }
  }
  if (conds_.nonempty_av) {
    for (int w = 0; w < nw; ++w) {
      std::vector<int> row;
      for (int v = 0; v < nw; ++v) row.push_back(vars_.av(w, v));
      cnf_.add(std::move(row));
    }
  }
  if (conds_.pv_refl) {
    for (int w = 0; w < nw; ++w) cnf_.add({vars_.pv(w, w)});
  }
  if (conds_.sem_5ab) {
    for (std::uint64_t x = 0; x < nsub; ++x) {
      for (std::uint64_t y = 0; y < nsub; ++y) {
        if ((x & y) == 0) cnf_.add({-vars_.ob(x, y)});
      }
    }
  }
  if (conds_.ob_ext) {
    for (std::uint64_t x = 0; x < nsub; ++x) {
      for (std::uint64_t y = 0; y < nsub; ++y) {
        for (std::uint64_t z = y + 1; z < nsub; ++z) {
          if ((x & y) == (x & z)) {
            cnf_.add({-vars_.ob(x, y), vars_.ob(x, z)});
            cnf_.add({vars_.ob(x, y), -vars_.ob(x, z)});
          }
        }
      }
    }
  }
  if (conds_.ob_closure) {
    for (std::uint64_t x = 0; x < nsub; ++x) {
      for (std::uint64_t y = 0; y < nsub; ++y) {
        for (std::uint64_t z = y + 1; z < nsub; ++z) {
          if ((x & y & z) != 0) {
            cnf_.add({-vars_.ob(x, y), -vars_.ob(x, z), vars_.ob(x, y & z)});
          }
        }
      }
    }
  }
  if (conds_.ob_up) {
    for (std::uint64_t x = 0; x < nsub; ++x) {
      for (std::uint64_t y = 0; y < nsub; ++y) {
        if ((y & ~x) != 0) continue;
        for (std::uint64_t z = 0; z < nsub; ++z) {
          if ((x & ~z) != 0) continue;
          cnf_.add({-vars_.ob(x, y), vars_.ob(z, (z & ~x) | y)});
        }
      }
    }
  }
  if (conds_.ob_down) {
    for (std::uint64_t x = 0; x < nsub; ++x) {
      for (std::uint64_t z = 0; z < nsub; ++z) {
        for (std::uint64_t sub = 0; sub < nsub; ++sub) {
          if ((sub & ~x) == 0 && (sub & z) != 0) {
            cnf_.add({-vars_.ob(x, z), vars_.ob(sub, z)});
          }
        }
      }
    }
  }
}

std::uint64_t Grounder::env_lookup(const std::string& name,
                                   const Env& env) const {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == name) return it->second;
  }
  throw std::logic_error("grounding: unbound variable " + name);
}

CharPtr Grounder::expanded_char(const CharPtr& f) {
  auto it = expand_cache_.find(f.get());
  if (it != expand_cache_.end()) return it->second;
  CharPtr e = expand_defs(theory_, f);
  expand_cache_.emplace(f.get(), e);
  return e;
}

MetaPtr Grounder::expanded_meta(const MetaPtr& m) {
  auto it = expand_meta_cache_.find(m.get());
  if (it != expand_meta_cache_.end()) return it->second;
  MetaPtr e = expand_defs(theory_, m);
  expand_meta_cache_.emplace(m.get(), e);
  return e;
}

const std::vector<std::string>& Grounder::node_free_vars(const CharPtr& f) {
  auto it = fv_cache_.find(f.get());
  if (it != fv_cache_.end()) return it->second;
  auto fv = free_vars(f);
  std::vector<std::string> sorted(fv.begin(), fv.end());
  std::sort(sorted.begin(), sorted.end());
  return fv_cache_.emplace(f.get(), std::move(sorted)).first->second;
}

int Grounder::ground_meta(const MetaPtr& m) {
  Env env;
  return ground(expanded_meta(m), env);
}

int Grounder::ground_char_at(const CharPtr& f, int c, int w) {
  Env env;
  return ground(expanded_char(f), env, c, w);
}

void Grounder::require(int lit) {
  if (lit == kTrueLit) return;
  cnf_.add({lit});
}

int Grounder::atctx_lit(const CharPtr& f, Env& env, int c) {
  std::vector<int> sels, lits;
  for (int w = 0; w < scope_.nw; ++w) {
    sels.push_back(vars_.world_sel(c, w));
    lits.push_back(ground(f, env, c, w));
  }
  return cnf_.selector_gate(sels, lits);
}

int Grounder::ground(const MetaPtr& m, Env& env) {
  switch (m->kind) {
    case MetaKind::Valid: {
      std::vector<int> parts;
      for (int c = 0; c < scope_.nc; ++c) {
        for (int w = 0; w < scope_.nw; ++w) {
          parts.push_back(ground(m->formula, env, c, w));
        }
      }
      return cnf_.mk_and(std::move(parts));
    }
    case MetaKind::ValidD: {
      std::vector<int> parts;
      for (int c = 0; c < scope_.nc; ++c) {
        parts.push_back(atctx_lit(m->formula, env, c));
      }
      return cnf_.mk_and(std::move(parts));
    }
    case MetaKind::ValidCtx:
    case MetaKind::AtCtx: {
      std::vector<Cand> cands = term_candidates(m->ctx, env);
      std::vector<int> guards, lits;
      for (const auto& cand : cands) {
        int c = static_cast<int>(cand.value);
        int lit;
        if (m->kind == MetaKind::AtCtx) {
          lit = atctx_lit(m->formula, env, c);
        } else {
          std::vector<int> parts;
          for (int w = 0; w < scope_.nw; ++w) {
            parts.push_back(ground(m->formula, env, c, w));
          }
          lit = cnf_.mk_and(std::move(parts));
        }
        if (cand.guard == kTrueLit) return lit;  // ground context
        guards.push_back(cand.guard);
        lits.push_back(lit);
      }
      return cnf_.selector_gate(guards, lits);
    }
    case MetaKind::MetaImp:
      return cnf_.mk_imp(ground(m->l, env), ground(m->r, env));
    case MetaKind::MetaAnd: {
      int a = ground(m->l, env);
      int b = ground(m->r, env);
      return cnf_.mk_and({a, b});
    }
    case MetaKind::MetaForallCtx: {
      std::vector<int> parts;
      for (int c = 0; c < scope_.nc; ++c) {
        env.emplace_back(m->var, static_cast<std::uint64_t>(c));
        parts.push_back(ground(m->l, env));
        env.pop_back();
      }
      return cnf_.mk_and(std::move(parts));
    }
  }
  throw std::logic_error("ground: unhandled meta kind");
}

int Grounder::ground(const CharPtr& f, Env& env, int c, int w) {
  const std::vector<std::string>& fv = node_free_vars(f);
  std::vector<std::uint64_t> fvals;
  fvals.reserve(fv.size());
  for (const auto& n : fv) fvals.push_back(env_lookup(n, env));
  auto key = std::make_tuple(f.get(), c, w, std::move(fvals));
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  int result;
  switch (f->kind) {
    case CharKind::Top: result = kTrueLit; break;
    case CharKind::Bottom: result = kFalseLit; break;
    case CharKind::Not: result = -ground(f->a, env, c, w); break;
    case CharKind::And: {
      int a = ground(f->a, env, c, w);
      int b = ground(f->b, env, c, w);
      result = cnf_.mk_and({a, b});
      break;
    }
    case CharKind::Or: {
      int a = ground(f->a, env, c, w);
      int b = ground(f->b, env, c, w);
      result = cnf_.mk_or({a, b});
      break;
    }
    case CharKind::Imp:
      result = cnf_.mk_imp(ground(f->a, env, c, w), ground(f->b, env, c, w));
      break;
    case CharKind::Iff:
      result = cnf_.mk_iff(ground(f->a, env, c, w), ground(f->b, env, c, w));
      break;
    case CharKind::BoxA:
    case CharKind::DiaA:
    case CharKind::BoxP:
    case CharKind::DiaP: {
      bool universal = f->kind == CharKind::BoxA || f->kind == CharKind::BoxP;
      bool actual = f->kind == CharKind::BoxA || f->kind == CharKind::DiaA;
      std::vector<int> parts;
      for (int v = 0; v < scope_.nw; ++v) {
        int row = actual ? vars_.av(w, v) : vars_.pv(w, v);
        int sub = ground(f->a, env, c, v);
        parts.push_back(universal ? cnf_.mk_or({-row, sub})
                                  : cnf_.mk_and({row, sub}));
      }
      result = universal ? cnf_.mk_and(std::move(parts))
                         : cnf_.mk_or(std::move(parts));
      break;
    }
    case CharKind::BoxD: {
      std::vector<int> parts;
      for (int cc = 0; cc < scope_.nc; ++cc) {
        parts.push_back(atctx_lit(f->a, env, cc));
      }
      result = cnf_.mk_and(std::move(parts));
      break;
    }
    case CharKind::ObDyadic: {
      std::vector<int> xlits, ylits;
      for (int v = 0; v < scope_.nw; ++v) {
        xlits.push_back(ground(f->b, env, c, v));
        ylits.push_back(ground(f->a, env, c, v));
      }
      result = ob_lookup(xlits, ylits);
      break;
    }
    case CharKind::ObA:
    case CharKind::ObI: {
      bool actual = f->kind == CharKind::ObA;
      std::vector<int> xlits, ylits, nonvac;
      for (int v = 0; v < scope_.nw; ++v) {
        int row = actual ? vars_.av(w, v) : vars_.pv(w, v);
        xlits.push_back(row);
        int sub = ground(f->a, env, c, v);
        ylits.push_back(sub);
        nonvac.push_back(cnf_.mk_and({row, -sub}));
      }
      int ob = ob_lookup(xlits, ylits);
      int escape = cnf_.mk_or(std::move(nonvac));
      result = cnf_.mk_and({ob, escape});
      break;
    }
    case CharKind::Forall:
    case CharKind::Exists: {
      bool universal = f->kind == CharKind::Forall;
      std::uint64_t n = universe_size(*f->binder, scope_, budget_);
      std::vector<int> parts;
      parts.reserve(n);
      for (std::uint64_t v = 0; v < n; ++v) {
        env.emplace_back(f->name, v);
        parts.push_back(ground(f->a, env, c, w));
        env.pop_back();
      }
      result = universal ? cnf_.mk_and(std::move(parts))
                         : cnf_.mk_or(std::move(parts));
      break;
    }
    default:
      result = atom_bit(f, env, c, w);
      break;
  }
  memo_.emplace(std::move(key), result);
  return result;
}

int Grounder::atom_bit(const CharPtr& t, Env& env, int c, int w) {
  const int point = c * scope_.nw + w;
  switch (t->kind) {
    case CharKind::Var:
      return (env_lookup(t->name, env) >> point & 1) ? kTrueLit : kFalseLit;
    case CharKind::Elem:
      return (t->elem >> point & 1) ? kTrueLit : kFalseLit;
    case CharKind::Const: {
      std::size_t ti = vars_.index_of(t->name);
      if (!vars_.tables[ti].arg_sorts.empty()) {
        throw UnsupportedSort("constant " + t->name +
                              " is not fully applied in formula position");
      }
      return vars_.m_cell(ti, 0, c, w);
    }
    case CharKind::App: {
      std::vector<CharPtr> args;
      CharPtr head = t;
      while (head->kind == CharKind::App) {
        args.push_back(head->b);
        head = head->a;
      }
      std::reverse(args.begin(), args.end());
      if (head->kind == CharKind::Var || head->kind == CharKind::Elem) {
        // Property value applied to an individual term.
        if (args.size() != 1) {
          throw UnsupportedSort(
              "unsupported application shape in formula position");
        }
        std::uint64_t packed = head->kind == CharKind::Var
                                   ? env_lookup(head->name, env)
                                   : head->elem;
        std::uint64_t stride =
            static_cast<std::uint64_t>(scope_.nc) * scope_.nw;
        std::vector<int> cases;
        for (const Cand& cand : term_candidates(args[0], env)) {
          bool bit = packed >> (cand.value * stride + point) & 1;
          if (bit) cases.push_back(cand.guard);
        }
        return cnf_.mk_or(std::move(cases));
      }
      if (head->kind != CharKind::Const) {
        throw UnsupportedSort("unsupported application head in grounding");
      }
      std::size_t ti = vars_.index_of(head->name);
      if (args.size() != vars_.tables[ti].arg_sorts.size()) {
        throw UnsupportedSort("constant " + head->name +
                              " is not fully applied in formula position");
      }
      return table_lookup_bit(ti, args, env, c, w);
    }
    default:
      throw std::logic_error("atom_bit: unexpected node kind");
  }
}

int Grounder::ob_lookup(const std::vector<int>& xlits,
                        const std::vector<int>& ylits) {
  const int nw = scope_.nw;
  const std::uint64_t nsub = 1ull << nw;
  bool ground_args = true;
  for (int l : xlits) ground_args = ground_args && is_const_lit(l);
  for (int l : ylits) ground_args = ground_args && is_const_lit(l);
  if (ground_args) {
    std::uint64_t x = 0, y = 0;
    for (int v = 0; v < nw; ++v) {
      if (xlits[v] == kTrueLit) x |= 1ull << v;
      if (ylits[v] == kTrueLit) y |= 1ull << v;
    }
    return vars_.ob(x, y);
  }
  auto eq_mask = [&](const std::vector<int>& lits, std::uint64_t m) {
    std::vector<int> parts(nw);
    for (int v = 0; v < nw; ++v) {
      parts[v] = (m >> v & 1) ? lits[v] : -lits[v];
    }
    return cnf_.mk_and(std::move(parts));
  };
  // A total case split over the pair of world sets; impossible cases fold
  // away through the equality guards.
  int t = cnf_.new_var();
  for (std::uint64_t x = 0; x < nsub; ++x) {
    int eqx = eq_mask(xlits, x);
    if (eqx == kFalseLit) continue;
    for (std::uint64_t y = 0; y < nsub; ++y) {
      int eqy = eq_mask(ylits, y);
      if (eqy == kFalseLit) continue;
      int obv = vars_.ob(x, y);
      cnf_.add({-eqx, -eqy, -obv, t});
      cnf_.add({-eqx, -eqy, obv, -t});
    }
  }
  return t;
}

std::vector<int> Grounder::m_lits(const CharPtr& f, Env& env) {
  std::vector<int> bits(scope_.nc * scope_.nw);
  for (int c = 0; c < scope_.nc; ++c) {
    for (int w = 0; w < scope_.nw; ++w) {
      bits[c * scope_.nw + w] = ground(f, env, c, w);
    }
  }
  return bits;
}

std::vector<int> Grounder::p_lits(const CharPtr& t, Env& env) {
  const std::uint64_t stride = static_cast<std::uint64_t>(scope_.nc) * scope_.nw;
  std::vector<int> bits(scope_.ne * stride);
  switch (t->kind) {
    case CharKind::Var:
    case CharKind::Elem: {
      std::uint64_t packed =
          t->kind == CharKind::Var ? env_lookup(t->name, env) : t->elem;
      for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = (packed >> i & 1) ? kTrueLit : kFalseLit;
      }
      return bits;
    }
    case CharKind::Const: {
      std::size_t ti = vars_.index_of(t->name);
      const auto& tv = vars_.tables[ti];
      if (tv.arg_sorts.size() != 1 || !(tv.arg_sorts[0] == Sort::e()) ||
          !(tv.result == Sort::m())) {
        throw UnsupportedSort("constant " + t->name +
                              " cannot be used as a property value");
      }
      for (int e = 0; e < scope_.ne; ++e) {
        for (int c = 0; c < scope_.nc; ++c) {
          for (int w = 0; w < scope_.nw; ++w) {
            bits[e * stride + c * scope_.nw + w] = vars_.m_cell(ti, e, c, w);
          }
        }
      }
      return bits;
    }
    default:
      throw UnsupportedSort(
          "only variables, named constants and enumerated values can appear "
          "as property arguments");
  }
}

std::vector<Grounder::Cand> Grounder::term_candidates(const CharPtr& t,
                                                      Env& env) {
  switch (t->kind) {
    case CharKind::Var:
      return {{kTrueLit, env_lookup(t->name, env)}};
    case CharKind::Elem:
      return {{kTrueLit, t->elem}};
    case CharKind::Const: {
      std::size_t ti = vars_.index_of(t->name);
      const auto& tv = vars_.tables[ti];
      if (!tv.arg_sorts.empty() || tv.result == Sort::m()) {
        throw UnsupportedSort("constant " + t->name +
                              " does not denote a first-order value");
      }
      std::vector<Cand> out;
      for (int v = 0; v < tv.var_count; ++v) {
        out.push_back({vars_.base_sel(ti, v),
                       static_cast<std::uint64_t>(v)});
      }
      return out;
    }
    case CharKind::App: {
      if (t->a->kind == CharKind::Const &&
          (t->a->name == Signature::kAgent ||
           t->a->name == Signature::kWorld)) {
        bool agent = t->a->name == Signature::kAgent;
        int n = agent ? scope_.ne : scope_.nw;
        std::vector<Cand> out;
        for (const Cand& inner : term_candidates(t->b, env)) {
          int c = static_cast<int>(inner.value);
          for (int v = 0; v < n; ++v) {
            int sel = agent ? vars_.agent_sel(c, v) : vars_.world_sel(c, v);
            int g = cnf_.mk_and({inner.guard, sel});
            if (g == kFalseLit) continue;
            out.push_back({g, static_cast<std::uint64_t>(v)});
          }
        }
        return out;
      }
      throw UnsupportedSort(
          "application does not denote a first-order value in grounding");
    }
    default:
      throw UnsupportedSort("term does not denote a first-order value");
  }
}

std::vector<Grounder::Cand> Grounder::bits_to_candidates(
    const std::vector<int>& bits) {
  bool ground_bits = true;
  for (int l : bits) ground_bits = ground_bits && is_const_lit(l);
  if (ground_bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == kTrueLit) v |= 1ull << i;
    }
    return {{kTrueLit, v}};
  }
  if (bits.size() > 20) {
    throw ScopeTooLarge("argument value space too large to case-split");
  }
  std::vector<Cand> out;
  for (std::uint64_t q = 0; q < (1ull << bits.size()); ++q) {
    std::vector<int> parts(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      parts[i] = (q >> i & 1) ? bits[i] : -bits[i];
    }
    int g = cnf_.mk_and(std::move(parts));
    if (g == kFalseLit) continue;
    out.push_back({g, q});
  }
  return out;
}

int Grounder::table_lookup_bit(std::size_t ti,
                               const std::vector<CharPtr>& args, Env& env,
                               int c, int w) {
  const auto& tv = vars_.tables[ti];
  std::vector<std::vector<Cand>> cands(args.size());
  std::uint64_t case_count = 1;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Sort& s = tv.arg_sorts[i];
    if (s == Sort::m()) {
      cands[i] = bits_to_candidates(m_lits(args[i], env));
    } else if (s == Sort::p()) {
      cands[i] = bits_to_candidates(p_lits(args[i], env));
    } else {
      cands[i] = term_candidates(args[i], env);
    }
    case_count *= cands[i].size();
    if (case_count > 1000000) {
      throw ScopeTooLarge("table lookup for " + tv.name +
                          " needs too many cases at this scope");
    }
  }
  struct Case {
    std::vector<int> guards;
    int cell;
  };
  std::vector<Case> cases;
  std::vector<std::uint64_t> vals(args.size());
  std::vector<int> guards;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == args.size()) {
      std::uint64_t flat = 0;
      for (std::size_t k = 0; k < vals.size(); ++k) {
        flat = flat * tv.arg_sizes[k] + vals[k];
      }
      cases.push_back({guards, vars_.m_cell(ti, flat, c, w)});
      return;
    }
    for (const Cand& cand : cands[i]) {
      vals[i] = cand.value;
      bool pushed = false;
      if (cand.guard != kTrueLit) {
        guards.push_back(cand.guard);
        pushed = true;
      }
      rec(i + 1);
      if (pushed) guards.pop_back();
    }
  };
  rec(0);
  if (cases.size() == 1 && cases[0].guards.empty()) return cases[0].cell;
  int t = cnf_.new_var();
  for (const Case& cs : cases) {
    std::vector<int> pos, neg;
    for (int g : cs.guards) {
      pos.push_back(-g);
      neg.push_back(-g);
    }
    pos.push_back(-cs.cell);
    pos.push_back(t);
    neg.push_back(cs.cell);
    neg.push_back(-t);
    cnf_.add(std::move(pos));
    cnf_.add(std::move(neg));
  }
  return t;
}

void Grounder::to_dimacs(std::ostream& os) const {
  os << "c ground deontic model-finding instance\n";
  os << "c scope " << scope_.to_string() << "\n";
  for (int v = 1; v <= vars_.core_count; ++v) {
    os << "c var " << v << ' ' << vars_.var_name(v) << "\n";
  }
  os << "p cnf " << cnf_.num_vars() << ' ' << cnf_.clauses().size() << "\n";
  for (const auto& cl : cnf_.clauses()) {
    for (int l : cl) os << l << ' ';
    os << "0\n";
  }
}

Interpretation Grounder::decode(
    const std::vector<std::int8_t>& assignment) const {
  auto truth = [&](int v) {
    return v < static_cast<int>(assignment.size()) && assignment[v] > 0;
  };
  Interpretation I = make_interpretation(theory_.signature, scope_, budget_);
  const int nw = scope_.nw, nc = scope_.nc, ne = scope_.ne;
  for (int w = 0; w < nw; ++w) {
    for (int v = 0; v < nw; ++v) {
      if (truth(vars_.av(w, v))) I.frame.av[w] |= 1ull << v;
      if (truth(vars_.pv(w, v))) I.frame.pv[w] |= 1ull << v;
    }
  }
  for (std::uint64_t x = 0; x < (1ull << nw); ++x) {
    for (std::uint64_t y = 0; y < (1ull << nw); ++y) {
      if (truth(vars_.ob(x, y))) I.frame.ob[x] |= 1ull << y;
    }
  }
  for (int c = 0; c < nc; ++c) {
    for (int w = 0; w < nw; ++w) {
      if (truth(vars_.world_sel(c, w))) {
        I.frame.world_of[c] = w;
        break;
      }
    }
    for (int e = 0; e < ne; ++e) {
      if (truth(vars_.agent_sel(c, e))) {
        I.frame.agent_of[c] = e;
        break;
      }
    }
  }
  for (std::size_t ti = 0; ti < vars_.tables.size(); ++ti) {
    const auto& tv = vars_.tables[ti];
    Table* tab = I.table(tv.name);
    if (tv.result == Sort::m()) {
      for (std::uint64_t tuple = 0; tuple < tv.tuple_count; ++tuple) {
        std::uint64_t mask = 0;
        for (int c = 0; c < nc; ++c) {
          for (int w = 0; w < nw; ++w) {
            if (truth(vars_.m_cell(ti, tuple, c, w))) {
              mask |= 1ull << (c * nw + w);
            }
          }
        }
        tab->cells[tuple] = mask;
      }
    } else {
      for (int v = 0; v < tv.var_count; ++v) {
        if (truth(vars_.base_sel(ti, v))) {
          tab->cells[0] = v;
          break;
        }
      }
    }
  }
  return I;
}

}  // namespace deonmf
