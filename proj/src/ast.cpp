#include "deonmf/ast.hpp"

#include <sstream>

namespace deonmf {

namespace {

CharPtr node(CharKind k) {
  auto n = std::make_shared<CharNode>();
  n->kind = k;
  return n;
}

}  // namespace

CharPtr mk_top() { return node(CharKind::Top); }
CharPtr mk_bottom() { return node(CharKind::Bottom); }

CharPtr mk_const(std::string name, int line, int col) {
  auto n = std::make_shared<CharNode>();
  n->kind = CharKind::Const;
  n->name = std::move(name);
  n->line = line;
  n->col = col;
  return n;
}

CharPtr mk_var(std::string name, int line, int col) {
  auto n = std::make_shared<CharNode>();
  n->kind = CharKind::Var;
  n->name = std::move(name);
  n->line = line;
  n->col = col;
  return n;
}

CharPtr mk_elem(Sort s, std::uint64_t index) {
  auto n = std::make_shared<CharNode>();
  n->kind = CharKind::Elem;
  n->binder = std::move(s);
  n->elem = index;
  return n;
}

CharPtr mk_app(CharPtr f, CharPtr arg) {
  auto n = std::make_shared<CharNode>();
  n->kind = CharKind::App;
  n->a = std::move(f);
  n->b = std::move(arg);
  return n;
}

CharPtr mk_unary(CharKind k, CharPtr a) {
  auto n = std::make_shared<CharNode>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

CharPtr mk_binary(CharKind k, CharPtr a, CharPtr b) {
  auto n = std::make_shared<CharNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

CharPtr mk_quant(CharKind k, std::string var, Sort s, CharPtr body) {
  auto n = std::make_shared<CharNode>();
  n->kind = k;
  n->name = std::move(var);
  n->binder = std::move(s);
  n->a = std::move(body);
  return n;
}

MetaPtr mk_valid(CharPtr f) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::Valid;
  n->formula = std::move(f);
  return n;
}

MetaPtr mk_validd(CharPtr f) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::ValidD;
  n->formula = std::move(f);
  return n;
}

MetaPtr mk_validctx(CharPtr ctx, CharPtr f) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::ValidCtx;
  n->ctx = std::move(ctx);
  n->formula = std::move(f);
  return n;
}

MetaPtr mk_atctx(CharPtr ctx, CharPtr f) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::AtCtx;
  n->ctx = std::move(ctx);
  n->formula = std::move(f);
  return n;
}

MetaPtr mk_metaimp(MetaPtr l, MetaPtr r) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::MetaImp;
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}

MetaPtr mk_metaand(MetaPtr l, MetaPtr r) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::MetaAnd;
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}

MetaPtr mk_metaforallctx(std::string var, MetaPtr body) {
  auto n = std::make_shared<MetaNode>();
  n->kind = MetaKind::MetaForallCtx;
  n->var = std::move(var);
  n->l = std::move(body);
  return n;
}

std::string expect_to_string(Expect e) {
  switch (e) {
    case Expect::Sat: return "sat";
    case Expect::Countermodel: return "countermodel";
    case Expect::BoundedValid: return "bounded-valid";
    case Expect::Entailed: return "entailed";
  }
  return "?";
}

Sort Definition::declared_sort() const {
  Sort s = Sort::m();
  for (auto it = params.rbegin(); it != params.rend(); ++it) {
    s = Sort::fun(it->second, s);
  }
  return s;
}

const Definition* Theory::find_definition(const std::string& name) const {
  for (const auto& d : definitions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const MetaPtr* Theory::find_axiom(const std::string& name) const {
  for (const auto& [n, m] : axioms) {
    if (n == name) return &m;
  }
  return nullptr;
}

const Goal* Theory::find_goal(const std::string& name) const {
  for (const auto& g : goals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

bool ast_equal(const CharPtr& x, const CharPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->name != y->name || x->elem != y->elem) {
    return false;
  }
  if (x->binder.has_value() != y->binder.has_value()) return false;
  if (x->binder && *x->binder != *y->binder) return false;
  return ast_equal(x->a, y->a) && ast_equal(x->b, y->b);
}

bool ast_equal(const MetaPtr& x, const MetaPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->var != y->var) return false;
  return ast_equal(x->formula, y->formula) && ast_equal(x->ctx, y->ctx) &&
         ast_equal(x->l, y->l) && ast_equal(x->r, y->r);
}

namespace {

using Renaming = std::vector<std::pair<std::string, std::string>>;

const std::string* rename_of(const Renaming& env, const std::string& v) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == v) return &it->second;
  }
  return nullptr;
}

bool alpha_eq_rec(const CharPtr& x, const CharPtr& y, Renaming& xy,
                  Renaming& yx) {
  if (!x || !y) return x == y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case CharKind::Top:
    case CharKind::Bottom:
      return true;
    case CharKind::Const:
      return x->name == y->name;
    case CharKind::Elem:
      return *x->binder == *y->binder && x->elem == y->elem;
    case CharKind::Var: {
      const std::string* fw = rename_of(xy, x->name);
      const std::string* bw = rename_of(yx, y->name);
      if (fw == nullptr && bw == nullptr) return x->name == y->name;  // free
      return fw != nullptr && bw != nullptr && *fw == y->name &&
             *bw == x->name;
    }
    case CharKind::Forall:
    case CharKind::Exists: {
      if (*x->binder != *y->binder) return false;
      xy.emplace_back(x->name, y->name);
      yx.emplace_back(y->name, x->name);
      bool ok = alpha_eq_rec(x->a, y->a, xy, yx);
      xy.pop_back();
      yx.pop_back();
      return ok;
    }
    default:
      return alpha_eq_rec(x->a, y->a, xy, yx) &&
             alpha_eq_rec(x->b, y->b, xy, yx);
  }
}

}  // namespace

bool alpha_equal(const CharPtr& x, const CharPtr& y) {
  Renaming xy, yx;
  return alpha_eq_rec(x, y, xy, yx);
}

namespace {

void free_vars_rec(const CharPtr& f, std::vector<std::string>& bound,
                   std::set<std::string>& out) {
  if (!f) return;
  switch (f->kind) {
    case CharKind::Var: {
      for (const auto& b : bound) {
        if (b == f->name) return;
      }
      out.insert(f->name);
      return;
    }
    case CharKind::Forall:
    case CharKind::Exists:
      bound.push_back(f->name);
      free_vars_rec(f->a, bound, out);
      bound.pop_back();
      return;
    default:
      free_vars_rec(f->a, bound, out);
      free_vars_rec(f->b, bound, out);
      return;
  }
}

void free_vars_rec(const MetaPtr& m, std::vector<std::string>& bound,
                   std::set<std::string>& out) {
  if (!m) return;
  if (m->kind == MetaKind::MetaForallCtx) {
    bound.push_back(m->var);
    free_vars_rec(m->l, bound, out);
    bound.pop_back();
    return;
  }
  free_vars_rec(m->formula, bound, out);
  free_vars_rec(m->ctx, bound, out);
  free_vars_rec(m->l, bound, out);
  free_vars_rec(m->r, bound, out);
}

}  // namespace

std::set<std::string> free_vars(const CharPtr& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(f, bound, out);
  return out;
}

std::set<std::string> free_vars(const MetaPtr& m) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(m, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// Printing.  Precedence, tightest first:
//   7 atoms and O<_|_>, 6 application, 5 prefix operators, 4 `and`, 3 `or`,
//   2 `->` (right), 1 `<->` (right), 0 quantifiers.
// The printer is the inverse of the parser: parse(print(f)) is AST-identical.

namespace {

int char_prec(const CharPtr& f) {
  switch (f->kind) {
    case CharKind::Top:
    case CharKind::Bottom:
    case CharKind::Const:
    case CharKind::Var:
    case CharKind::Elem:
    case CharKind::ObDyadic:
      return 7;
    case CharKind::App:
      return 6;
    case CharKind::Not:
    case CharKind::BoxA:
    case CharKind::DiaA:
    case CharKind::BoxP:
    case CharKind::DiaP:
    case CharKind::BoxD:
    case CharKind::ObA:
    case CharKind::ObI:
      return 5;
    case CharKind::And: return 4;
    case CharKind::Or: return 3;
    case CharKind::Imp: return 2;
    case CharKind::Iff: return 1;
    case CharKind::Forall:
    case CharKind::Exists:
      return 0;
  }
  return 7;
}

const char* prefix_name(CharKind k) {
  switch (k) {
    case CharKind::Not: return "not";
    case CharKind::BoxA: return "boxA";
    case CharKind::DiaA: return "diaA";
    case CharKind::BoxP: return "boxP";
    case CharKind::DiaP: return "diaP";
    case CharKind::BoxD: return "boxD";
    case CharKind::ObA: return "Oa";
    case CharKind::ObI: return "Oi";
    default: return "?";
  }
}

void print_char_rec(const CharPtr& f, int min_prec, std::ostream& os) {
  int p = char_prec(f);
  bool paren = p < min_prec;
  if (paren) os << '(';
  switch (f->kind) {
    case CharKind::Top: os << "true"; break;
    case CharKind::Bottom: os << "false"; break;
    case CharKind::Const:
    case CharKind::Var:
      os << f->name;
      break;
    case CharKind::Elem:
      os << "elem!" << f->binder->to_string() << '!' << f->elem;
      break;
    case CharKind::App:
      print_char_rec(f->a, 6, os);
      os << ' ';
      print_char_rec(f->b, 7, os);
      break;
    case CharKind::Not:
    case CharKind::BoxA:
    case CharKind::DiaA:
    case CharKind::BoxP:
    case CharKind::DiaP:
    case CharKind::BoxD:
    case CharKind::ObA:
    case CharKind::ObI:
      os << prefix_name(f->kind) << ' ';
      print_char_rec(f->a, 5, os);
      break;
    case CharKind::ObDyadic:
      os << "O< ";
      print_char_rec(f->a, 0, os);
      os << " | ";
      print_char_rec(f->b, 0, os);
      os << " >";
      break;
    case CharKind::And:
      print_char_rec(f->a, 4, os);
      os << " and ";
      print_char_rec(f->b, 5, os);
      break;
    case CharKind::Or:
      print_char_rec(f->a, 3, os);
      os << " or ";
      print_char_rec(f->b, 4, os);
      break;
    case CharKind::Imp:
      print_char_rec(f->a, 3, os);
      os << " -> ";
      print_char_rec(f->b, 2, os);
      break;
    case CharKind::Iff:
      print_char_rec(f->a, 2, os);
      os << " <-> ";
      print_char_rec(f->b, 1, os);
      break;
    case CharKind::Forall:
    case CharKind::Exists:
      os << (f->kind == CharKind::Forall ? "forall " : "exists ") << f->name
         << ": " << f->binder->to_string() << ". ";
      print_char_rec(f->a, 0, os);
      break;
  }
  if (paren) os << ')';
}

// Meta precedence: 3 judgement atoms, 2 `&`, 1 `==>` (right), 0 forallctx.
int meta_prec(const MetaPtr& m) {
  switch (m->kind) {
    case MetaKind::MetaForallCtx: return 0;
    case MetaKind::MetaImp: return 1;
    case MetaKind::MetaAnd: return 2;
    default: return 3;
  }
}

void print_meta_rec(const MetaPtr& m, int min_prec, std::ostream& os) {
  int p = meta_prec(m);
  bool paren = p < min_prec;
  if (paren) os << '(';
  switch (m->kind) {
    case MetaKind::Valid:
      os << "valid ";
      print_char_rec(m->formula, 6, os);
      break;
    case MetaKind::ValidD:
      os << "validD ";
      print_char_rec(m->formula, 6, os);
      break;
    case MetaKind::ValidCtx:
      os << "validCtx ";
      print_char_rec(m->ctx, 7, os);
      os << ' ';
      print_char_rec(m->formula, 6, os);
      break;
    case MetaKind::AtCtx:
      os << "validAt ";
      print_char_rec(m->ctx, 7, os);
      os << ' ';
      print_char_rec(m->formula, 6, os);
      break;
    case MetaKind::MetaAnd:
      print_meta_rec(m->l, 2, os);
      os << " & ";
      print_meta_rec(m->r, 3, os);
      break;
    case MetaKind::MetaImp:
      print_meta_rec(m->l, 2, os);
      os << " ==> ";
      print_meta_rec(m->r, 1, os);
      break;
    case MetaKind::MetaForallCtx: {
      os << "forallctx " << m->var;
      MetaPtr body = m->l;
      while (body->kind == MetaKind::MetaForallCtx) {
        os << ' ' << body->var;
        body = body->l;
      }
      os << ". ";
      print_meta_rec(body, 0, os);
      break;
    }
  }
  if (paren) os << ')';
}

}  // namespace

std::string print_char(const CharPtr& f) {
  std::ostringstream os;
  print_char_rec(f, 0, os);
  return os.str();
}

std::string print_meta(const MetaPtr& m) {
  std::ostringstream os;
  print_meta_rec(m, 0, os);
  return os.str();
}

std::string print_theory(const Theory& t) {
  std::ostringstream os;
  if (!t.aliases.user_aliases().empty()) {
    os << "sorts\n";
    for (const auto& [n, s] : t.aliases.user_aliases()) {
      os << "  " << n << " := " << s.to_string() << '\n';
    }
    os << '\n';
  }
  for (const auto& [n, s] : t.signature.user_entries()) {
    os << "consts " << n << " : " << s.to_string() << '\n';
  }
  if (!t.signature.user_entries().empty()) os << '\n';
  for (const auto& d : t.definitions) {
    os << "def " << d.name << '(';
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) os << ", ";
      os << d.params[i].first << ": " << d.params[i].second.to_string();
    }
    os << ')';
    if (d.reconstructed) os << " [reconstructed]";
    os << " := " << print_char(d.body) << "\n\n";
  }
  for (const auto& [n, m] : t.axioms) {
    os << "axiom " << n << " : " << print_meta(m) << "\n\n";
  }
  for (const auto& g : t.goals) {
    os << "goal " << g.name << "\n  [expect = " << expect_to_string(g.expect)
       << ", scope = " << g.scope.to_string();
    if (g.uses) {
      os << ", uses = [";
      for (std::size_t i = 0; i < g.uses->size(); ++i) {
        if (i) os << ", ";
        os << (*g.uses)[i];
      }
      os << ']';
    }
    if (!g.anchor.empty()) os << ", anchor = \"" << g.anchor << '"';
    os << "]\n  : " << print_meta(g.formula) << "\n\n";
  }
  return os.str();
}

}  // namespace deonmf
