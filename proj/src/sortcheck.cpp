#include "deonmf/sortcheck.hpp"

#include <algorithm>

namespace deonmf {

const Sort& SortedTheory::sort_of(const CharPtr& f) const {
  auto it = node_sorts.find(f.get());
  if (it == node_sorts.end()) {
    throw std::logic_error("sort_of: node was not checked");
  }
  return it->second;
}

namespace {

class Checker {
 public:
  explicit Checker(Theory t) : out_{std::move(t), {}} {}

  SortedTheory run() {
    const Theory& t = out_.theory;
    // Definitions see only earlier definitions, which keeps them acyclic.
    for (std::size_t i = 0; i < t.definitions.size(); ++i) {
      visible_defs_ = i;
      const Definition& d = t.definitions[i];
      Env env;
      for (const auto& [n, s] : d.params) {
        check_binder_name(n, d.line, d.col);
        env.emplace_back(n, s);
      }
      Sort s = check_char(d.body, env);
      require_m(s, d.body);
    }
    visible_defs_ = t.definitions.size();
    for (const auto& [name, ax] : t.axioms) check_meta(ax);
    for (const auto& g : t.goals) check_meta(g.formula);
    return std::move(out_);
  }

 private:
  using Env = std::vector<std::pair<std::string, Sort>>;

  SortedTheory out_;
  std::size_t visible_defs_ = 0;

  void check_binder_name(const std::string& n, int line, int col) const {
    if (out_.theory.signature.contains(n) ||
        out_.theory.find_definition(n) != nullptr) {
      throw DuplicateName(n + " (bound variable shadows a constant)", line,
                          col);
    }
  }

  void require_m(const Sort& s, const CharPtr& at) const {
    if (s != Sort::m()) {
      throw SortMismatch("M", s.to_string(), at->line, at->col);
    }
  }

  const Sort* lookup_env(const Env& env, const std::string& n) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == n) return &it->second;
    }
    return nullptr;
  }

  Sort record(const CharPtr& f, Sort s) {
    out_.node_sorts.emplace(f.get(), s);
    return s;
  }

  // Number of arguments a definition head receives in `f`'s spine.
  const Definition* visible_definition(const std::string& name) const {
    for (std::size_t i = 0; i < visible_defs_; ++i) {
      if (out_.theory.definitions[i].name == name) {
        return &out_.theory.definitions[i];
      }
    }
    return nullptr;
  }

  Sort check_char(const CharPtr& f, Env& env) {
    switch (f->kind) {
      case CharKind::Top:
      case CharKind::Bottom:
        return record(f, Sort::m());
      case CharKind::Elem:
        return record(f, *f->binder);
      case CharKind::Var: {
        const Sort* s = lookup_env(env, f->name);
        if (s == nullptr) throw UnboundVariable(f->name, f->line, f->col);
        return record(f, *s);
      }
      case CharKind::Const: {
        if (const Sort* s = out_.theory.signature.lookup(f->name)) {
          return record(f, *s);
        }
        if (const Definition* d = visible_definition(f->name)) {
          if (!d->params.empty()) {
            // A bare definition head cannot stand for a function value.
            throw ArityError("definition " + f->name + " expects " +
                                 std::to_string(d->params.size()) +
                                 " argument(s) and must be fully applied",
                             f->line, f->col);
          }
          return record(f, d->declared_sort());
        }
        // Late definitions are invisible inside earlier bodies: report the
        // name as unbound rather than permitting a cycle.
        throw UnboundVariable(f->name, f->line, f->col);
      }
      case CharKind::App: {
        // Check the spine head specially so definitions must be saturated.
        std::vector<CharPtr> spine;
        CharPtr head = f;
        while (head->kind == CharKind::App) {
          spine.push_back(head);
          head = head->a;
        }
        std::reverse(spine.begin(), spine.end());
        Sort fs = Sort::prop();
        bool head_done = false;
        if (head->kind == CharKind::Const) {
          if (const Definition* d = visible_definition(head->name);
              d != nullptr && out_.theory.signature.lookup(head->name) ==
                                  nullptr) {
            if (spine.size() < d->params.size()) {
              throw ArityError("definition " + head->name + " expects " +
                                   std::to_string(d->params.size()) +
                                   " argument(s), got " +
                                   std::to_string(spine.size()),
                               head->line, head->col);
            }
            // The head of a saturated definition stands for its declared
            // function sort; the bare-head restriction applies elsewhere.
            fs = record(head, d->declared_sort());
            head_done = true;
          }
        }
        if (!head_done) fs = check_char(head, env);
        for (const CharPtr& app : spine) {
          if (!fs.is_fun()) {
            throw ArityError("cannot apply a term of base sort " +
                                 fs.to_string(),
                             app->line ? app->line : head->line,
                             app->col ? app->col : head->col);
          }
          Sort as = check_char(app->b, env);
          if (as != fs.domain()) {
            throw SortMismatch(fs.domain().to_string(), as.to_string(),
                               app->b->line ? app->b->line : head->line,
                               app->b->col ? app->b->col : head->col);
          }
          fs = fs.codomain();
          record(app, fs);
        }
        return fs;
      }
      case CharKind::Not:
      case CharKind::BoxA:
      case CharKind::DiaA:
      case CharKind::BoxP:
      case CharKind::DiaP:
      case CharKind::BoxD:
      case CharKind::ObA:
      case CharKind::ObI:
        require_m(check_char(f->a, env), f->a);
        return record(f, Sort::m());
      case CharKind::And:
      case CharKind::Or:
      case CharKind::Imp:
      case CharKind::Iff:
      case CharKind::ObDyadic:
        require_m(check_char(f->a, env), f->a);
        require_m(check_char(f->b, env), f->b);
        return record(f, Sort::m());
      case CharKind::Forall:
      case CharKind::Exists: {
        check_binder_name(f->name, f->line, f->col);
        env.emplace_back(f->name, *f->binder);
        Sort body = check_char(f->a, env);
        env.pop_back();
        require_m(body, f->a);
        return record(f, Sort::m());
      }
    }
    throw std::logic_error("check_char: unhandled node kind");
  }

  void check_ctx_term(const CharPtr& ctx, Env& env) {
    Sort s = check_char(ctx, env);
    if (s != Sort::c()) {
      throw SortMismatch("C", s.to_string(), ctx->line, ctx->col);
    }
  }

  void check_meta_rec(const MetaPtr& m, Env& env) {
    switch (m->kind) {
      case MetaKind::Valid:
      case MetaKind::ValidD:
        require_m(check_char(m->formula, env), m->formula);
        return;
      case MetaKind::ValidCtx:
      case MetaKind::AtCtx:
        check_ctx_term(m->ctx, env);
        require_m(check_char(m->formula, env), m->formula);
        return;
      case MetaKind::MetaImp:
      case MetaKind::MetaAnd:
        check_meta_rec(m->l, env);
        check_meta_rec(m->r, env);
        return;
      case MetaKind::MetaForallCtx: {
        check_binder_name(m->var, m->line, m->col);
        env.emplace_back(m->var, Sort::c());
        check_meta_rec(m->l, env);
        env.pop_back();
        return;
      }
    }
  }

  void check_meta(const MetaPtr& m) {
    Env env;
    check_meta_rec(m, env);
  }
};

}  // namespace

SortedTheory sort_check(Theory t) { return Checker(std::move(t)).run(); }

namespace {

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (avoid.find(cand) == avoid.end()) return cand;
  }
}

CharPtr subst_rec(const CharPtr& f, const std::string& var,
                  const CharPtr& repl, const std::set<std::string>& repl_fv) {
  if (!f) return f;
  switch (f->kind) {
    case CharKind::Var:
      return f->name == var ? repl : f;
    case CharKind::Top:
    case CharKind::Bottom:
    case CharKind::Const:
    case CharKind::Elem:
      return f;
    case CharKind::Forall:
    case CharKind::Exists: {
      if (f->name == var) return f;  // occurrence is shadowed
      std::set<std::string> body_fv = free_vars(f->a);
      if (body_fv.find(var) == body_fv.end()) return f;  // nothing to do
      if (repl_fv.find(f->name) != repl_fv.end()) {
        // The binder would capture a free variable of the replacement:
        // rename it first.
        std::set<std::string> avoid = repl_fv;
        avoid.insert(body_fv.begin(), body_fv.end());
        avoid.insert(var);
        std::string nn = fresh_name(f->name, avoid);
        CharPtr renamed_body =
            subst_rec(f->a, f->name, mk_var(nn), {nn});
        CharPtr new_body = subst_rec(renamed_body, var, repl, repl_fv);
        return mk_quant(f->kind, nn, *f->binder, new_body);
      }
      CharPtr nb = subst_rec(f->a, var, repl, repl_fv);
      if (nb == f->a) return f;
      return mk_quant(f->kind, f->name, *f->binder, nb);
    }
    default: {
      CharPtr na = f->a ? subst_rec(f->a, var, repl, repl_fv) : nullptr;
      CharPtr nb = f->b ? subst_rec(f->b, var, repl, repl_fv) : nullptr;
      if (na == f->a && nb == f->b) return f;
      auto n = std::make_shared<CharNode>(*f);
      n->a = na;
      n->b = nb;
      return n;
    }
  }
}

}  // namespace

CharPtr substitute(const CharPtr& f, const std::string& var,
                   const CharPtr& repl) {
  return subst_rec(f, var, repl, free_vars(repl));
}

MetaPtr substitute(const MetaPtr& m, const std::string& var,
                   const CharPtr& repl) {
  if (!m) return m;
  auto n = std::make_shared<MetaNode>(*m);
  if (m->kind == MetaKind::MetaForallCtx) {
    if (m->var == var) return m;
    // Context binders never clash in practice; renaming keeps it total.
    std::set<std::string> rfv = free_vars(repl);
    if (rfv.find(m->var) != rfv.end()) {
      std::set<std::string> avoid = rfv;
      auto bfv = free_vars(m->l);
      avoid.insert(bfv.begin(), bfv.end());
      avoid.insert(var);
      std::string nn = fresh_name(m->var, avoid);
      MetaPtr renamed = substitute(m->l, m->var, mk_var(nn));
      n->var = nn;
      n->l = substitute(renamed, var, repl);
      return n;
    }
    n->l = substitute(m->l, var, repl);
    return n;
  }
  if (m->formula) n->formula = substitute(m->formula, var, repl);
  if (m->ctx) n->ctx = substitute(m->ctx, var, repl);
  if (m->l) n->l = substitute(m->l, var, repl);
  if (m->r) n->r = substitute(m->r, var, repl);
  return n;
}

namespace {

CharPtr expand_rec(const Theory& t, const CharPtr& f) {
  if (!f) return f;
  switch (f->kind) {
    case CharKind::Top:
    case CharKind::Bottom:
    case CharKind::Var:
    case CharKind::Elem:
      return f;
    case CharKind::Const: {
      const Definition* d = t.find_definition(f->name);
      if (d != nullptr && d->params.empty()) {
        return expand_rec(t, d->body);
      }
      return f;
    }
    case CharKind::App: {
      std::vector<CharPtr> args;
      CharPtr head = f;
      while (head->kind == CharKind::App) {
        args.push_back(head->b);
        head = head->a;
      }
      std::reverse(args.begin(), args.end());
      if (head->kind == CharKind::Const) {
        const Definition* d = t.find_definition(head->name);
        if (d != nullptr && t.signature.lookup(head->name) == nullptr) {
          if (args.size() < d->params.size()) {
            throw ArityError("definition " + head->name +
                                 " must be fully applied",
                             head->line, head->col);
          }
          CharPtr body = d->body;
          for (std::size_t i = 0; i < d->params.size(); ++i) {
            body = substitute(body, d->params[i].first,
                              expand_rec(t, args[i]));
          }
          for (std::size_t i = d->params.size(); i < args.size(); ++i) {
            body = mk_app(body, expand_rec(t, args[i]));
          }
          return expand_rec(t, body);
        }
      }
      CharPtr out = expand_rec(t, head);
      for (const CharPtr& a : args) out = mk_app(out, expand_rec(t, a));
      return out;
    }
    case CharKind::Forall:
    case CharKind::Exists: {
      CharPtr nb = expand_rec(t, f->a);
      if (nb == f->a) return f;
      return mk_quant(f->kind, f->name, *f->binder, nb);
    }
    default: {
      CharPtr na = f->a ? expand_rec(t, f->a) : nullptr;
      CharPtr nb = f->b ? expand_rec(t, f->b) : nullptr;
      if (na == f->a && nb == f->b) return f;
      auto n = std::make_shared<CharNode>(*f);
      n->a = na;
      n->b = nb;
      return n;
    }
  }
}

}  // namespace

CharPtr expand_defs(const Theory& t, const CharPtr& f) {
  return expand_rec(t, f);
}

MetaPtr expand_defs(const Theory& t, const MetaPtr& m) {
  if (!m) return m;
  auto n = std::make_shared<MetaNode>(*m);
  if (m->formula) n->formula = expand_defs(t, m->formula);
  if (m->ctx) n->ctx = expand_defs(t, m->ctx);
  if (m->l) n->l = expand_defs(t, m->l);
  if (m->r) n->r = expand_defs(t, m->r);
  return n;
}

}  // namespace deonmf
