#include "deonmf/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace deonmf {

namespace {

enum class Tok : std::uint8_t {
  Ident, Int, String,
  KwSorts, KwConsts, KwDef, KwAxiom, KwGoal,
  KwNot, KwAnd, KwOr, KwImp, KwIff,
  KwForall, KwExists, KwForallCtx,
  KwValid, KwValidD, KwValidAt, KwValidCtx,
  KwBoxA, KwDiaA, KwBoxP, KwDiaP, KwBoxD, KwOa, KwOi, KwOd,
  KwTrue, KwFalse,
  LParen, RParen, LBracket, RBracket,
  Colon, ColonEq, Dot, Comma, Eq,
  Arrow, IffArrow, MetaArrow, Amp, Pipe, Gt,
  ODyadic,  // the two characters "O<"
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  int line = 1, col = 1;
};

const std::map<std::string, Tok>& keyword_table() {
  static const std::map<std::string, Tok> kw = {
      {"sorts", Tok::KwSorts},       {"consts", Tok::KwConsts},
      {"def", Tok::KwDef},           {"axiom", Tok::KwAxiom},
      {"goal", Tok::KwGoal},         {"not", Tok::KwNot},
      {"and", Tok::KwAnd},           {"or", Tok::KwOr},
      {"imp", Tok::KwImp},           {"iff", Tok::KwIff},
      {"forall", Tok::KwForall},     {"exists", Tok::KwExists},
      {"forallctx", Tok::KwForallCtx},
      {"valid", Tok::KwValid},       {"validD", Tok::KwValidD},
      {"validAt", Tok::KwValidAt},   {"validCtx", Tok::KwValidCtx},
      {"boxA", Tok::KwBoxA},         {"diaA", Tok::KwDiaA},
      {"boxP", Tok::KwBoxP},         {"diaP", Tok::KwDiaP},
      {"boxD", Tok::KwBoxD},         {"Oa", Tok::KwOa},
      {"Oi", Tok::KwOi},             {"Od", Tok::KwOd},
      {"true", Tok::KwTrue},         {"false", Tok::KwFalse},
  };
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_mid(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), 0, l, c});
  };
  while (i < s.size()) {
    char c = s[i];
    int tl = line, tc = col;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, "(", tl, tc); advance(1); continue;
      case ')': push(Tok::RParen, ")", tl, tc); advance(1); continue;
      case '[': push(Tok::LBracket, "[", tl, tc); advance(1); continue;
      case ']': push(Tok::RBracket, "]", tl, tc); advance(1); continue;
      case '.': push(Tok::Dot, ".", tl, tc); advance(1); continue;
      case ',': push(Tok::Comma, ",", tl, tc); advance(1); continue;
      case '&': push(Tok::Amp, "&", tl, tc); advance(1); continue;
      case '|': push(Tok::Pipe, "|", tl, tc); advance(1); continue;
      case '>': push(Tok::Gt, ">", tl, tc); advance(1); continue;
      default: break;
    }
    if (c == ':') {
      if (i + 1 < s.size() && s[i + 1] == '=') {
        push(Tok::ColonEq, ":=", tl, tc);
        advance(2);
      } else {
        push(Tok::Colon, ":", tl, tc);
        advance(1);
      }
      continue;
    }
    if (c == '=') {
      if (i + 2 < s.size() && s[i + 1] == '=' && s[i + 2] == '>') {
        push(Tok::MetaArrow, "==>", tl, tc);
        advance(3);
      } else {
        push(Tok::Eq, "=", tl, tc);
        advance(1);
      }
      continue;
    }
    if (c == '-') {
      if (i + 1 < s.size() && s[i + 1] == '>') {
        push(Tok::Arrow, "->", tl, tc);
        advance(2);
        continue;
      }
      throw ParseError("unexpected '-'", tl, tc);
    }
    if (c == '<') {
      if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
        push(Tok::IffArrow, "<->", tl, tc);
        advance(3);
        continue;
      }
      throw ParseError("unexpected '<'", tl, tc);
    }
    if (c == '"') {
      std::string text;
      advance(1);
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size() &&
            (s[i + 1] == '"' || s[i + 1] == '\\')) {
          text.push_back(s[i + 1]);
          advance(2);
        } else if (s[i] == '\n') {
          throw ParseError("unterminated string literal", tl, tc);
        } else {
          text.push_back(s[i]);
          advance(1);
        }
      }
      if (i >= s.size()) {
        throw ParseError("unterminated string literal", tl, tc);
      }
      advance(1);
      out.push_back(Token{Tok::String, std::move(text), 0, tl, tc});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        text.push_back(s[i]);
        advance(1);
      }
      Token t{Tok::Int, text, std::stol(text), tl, tc};
      out.push_back(std::move(t));
      continue;
    }
    if (ident_start(c)) {
      std::string text;
      while (i < s.size()) {
        if (ident_mid(s[i])) {
          text.push_back(s[i]);
          advance(1);
          continue;
        }
        // '-' continues an identifier only when followed by an identifier
        // character, so "bounded-valid" is one token but "a->b" is three.
        if (s[i] == '-' && i + 1 < s.size() && ident_mid(s[i + 1])) {
          text.push_back(s[i]);
          advance(1);
          continue;
        }
        break;
      }
      if (text == "O" && i < s.size() && s[i] == '<') {
        advance(1);
        push(Tok::ODyadic, "O<", tl, tc);
        continue;
      }
      auto it = keyword_table().find(text);
      if (it != keyword_table().end()) {
        push(it->second, text, tl, tc);
      } else {
        push(Tok::Ident, text, tl, tc);
      }
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back(Token{Tok::Eof, "", 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Theory run() {
    Theory t;
    while (!at(Tok::Eof)) {
      if (accept(Tok::KwSorts)) {
        parse_sorts_block(t);
      } else if (accept(Tok::KwConsts)) {
        parse_consts_block(t);
      } else if (accept(Tok::KwDef)) {
        parse_def_block(t);
      } else if (accept(Tok::KwAxiom)) {
        parse_axiom_block(t);
      } else if (accept(Tok::KwGoal)) {
        parse_goal_block(t);
      } else {
        fail("expected 'sorts', 'consts', 'def', 'axiom' or 'goal'");
      }
    }
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
  Theory* theory_ = nullptr;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t p = pos_ + ahead;
    if (p >= toks_.size()) p = toks_.size() - 1;
    return toks_[p];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (at(k)) {
      next();
      return true;
    }
    return false;
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, t.line, t.col);
  }

  bool is_bound(const std::string& name) const {
    for (const auto& b : bound_) {
      if (b == name) return true;
    }
    return false;
  }

  // --- sorts ----------------------------------------------------------

  Sort parse_sort_atom(Theory& t) {
    if (accept(Tok::LParen)) {
      Sort s = parse_sort(t);
      expect(Tok::RParen, "')'");
      return s;
    }
    Token n = expect(Tok::Ident, "a sort name");
    const Sort* s = t.aliases.lookup(n.text);
    if (s == nullptr) throw UnknownSort(n.text, n.line, n.col);
    return *s;
  }

  Sort parse_sort(Theory& t) {
    Sort dom = parse_sort_atom(t);
    if (accept(Tok::Arrow)) return Sort::fun(dom, parse_sort(t));
    return dom;
  }

  void parse_sorts_block(Theory& t) {
    while (at(Tok::Ident)) {
      Token n = next();
      expect(Tok::ColonEq, "':='");
      Sort s = parse_sort(t);
      try {
        t.aliases.define(n.text, s);
      } catch (const std::invalid_argument&) {
        throw DuplicateName(n.text, n.line, n.col);
      }
    }
  }

  void parse_consts_block(Theory& t) {
    if (!at(Tok::Ident)) expect(Tok::Ident, "a constant name");
    while (at(Tok::Ident)) {
      Token n = next();
      expect(Tok::Colon, "':'");
      Sort s = parse_sort(t);
      if (t.signature.contains(n.text) || t.find_definition(n.text)) {
        throw DuplicateName(n.text, n.line, n.col);
      }
      t.signature.declare(n.text, s);
    }
  }

  void parse_def_block(Theory& t) {
    Token n = expect(Tok::Ident, "a definition name");
    if (t.signature.contains(n.text) || t.find_definition(n.text)) {
      throw DuplicateName(n.text, n.line, n.col);
    }
    Definition d;
    d.name = n.text;
    d.line = n.line;
    d.col = n.col;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        Token p = expect(Tok::Ident, "a parameter name");
        expect(Tok::Colon, "':'");
        Sort s = parse_sort(t);
        for (const auto& [pn, ps] : d.params) {
          if (pn == p.text) throw DuplicateName(p.text, p.line, p.col);
        }
        d.params.emplace_back(p.text, s);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (accept(Tok::LBracket)) {
      Token a = expect(Tok::Ident, "'reconstructed'");
      if (a.text != "reconstructed") {
        throw ParseError("unknown definition attribute: " + a.text, a.line,
                         a.col);
      }
      d.reconstructed = true;
      expect(Tok::RBracket, "']'");
    }
    expect(Tok::ColonEq, "':='");
    std::size_t mark = bound_.size();
    for (const auto& [pn, ps] : d.params) bound_.push_back(pn);
    theory_ = &t;
    d.body = parse_char();
    bound_.resize(mark);
    t.definitions.push_back(std::move(d));
  }

  void parse_axiom_block(Theory& t) {
    Token n = expect(Tok::Ident, "an axiom name");
    if (t.find_axiom(n.text)) throw DuplicateName(n.text, n.line, n.col);
    expect(Tok::Colon, "':'");
    theory_ = &t;
    t.axioms.emplace_back(n.text, parse_meta());
  }

  void parse_goal_block(Theory& t) {
    Token n = expect(Tok::Ident, "a goal name");
    if (t.find_goal(n.text)) throw DuplicateName(n.text, n.line, n.col);
    Goal g;
    g.name = n.text;
    g.line = n.line;
    g.col = n.col;
    if (accept(Tok::LBracket)) {
      do {
        Token a = expect(Tok::Ident, "an attribute name");
        expect(Tok::Eq, "'='");
        if (a.text == "expect") {
          Token v = expect(Tok::Ident, "an expectation");
          if (v.text == "sat") {
            g.expect = Expect::Sat;
          } else if (v.text == "countermodel") {
            g.expect = Expect::Countermodel;
          } else if (v.text == "bounded-valid") {
            g.expect = Expect::BoundedValid;
          } else if (v.text == "entailed") {
            g.expect = Expect::Entailed;
          } else {
            throw ParseError(
                "expect must be sat, countermodel, bounded-valid or entailed",
                v.line, v.col);
          }
        } else if (a.text == "scope") {
          g.scope = parse_scope_triple();
        } else if (a.text == "uses") {
          expect(Tok::LBracket, "'['");
          std::vector<std::string> names;
          if (!at(Tok::RBracket)) {
            do {
              names.push_back(expect(Tok::Ident, "an axiom name").text);
            } while (accept(Tok::Comma));
          }
          expect(Tok::RBracket, "']'");
          g.uses = std::move(names);
        } else if (a.text == "anchor") {
          g.anchor = expect(Tok::String, "a string").text;
        } else {
          throw ParseError("unknown goal attribute: " + a.text, a.line, a.col);
        }
      } while (accept(Tok::Comma));
      expect(Tok::RBracket, "']'");
    }
    expect(Tok::Colon, "':'");
    theory_ = &t;
    g.formula = parse_meta();
    t.goals.push_back(std::move(g));
  }

  Scope parse_scope_triple() {
    int nc = -1, ne = -1, nw = -1;
    for (int k = 0; k < 3; ++k) {
      if (k > 0) expect(Tok::Comma, "','");
      Token d = expect(Tok::Ident, "'c', 'e' or 'w'");
      expect(Tok::Eq, "'='");
      Token v = expect(Tok::Int, "an integer");
      if (v.value < 1) {
        throw ParseError("scope components must be >= 1", v.line, v.col);
      }
      if (d.text == "c" && nc < 0) {
        nc = static_cast<int>(v.value);
      } else if (d.text == "e" && ne < 0) {
        ne = static_cast<int>(v.value);
      } else if (d.text == "w" && nw < 0) {
        nw = static_cast<int>(v.value);
      } else {
        throw ParseError("scope needs each of c=, e=, w= exactly once", d.line,
                         d.col);
      }
    }
    return Scope(nc, ne, nw);
  }

  // --- meta formulas ---------------------------------------------------

  MetaPtr parse_meta() { return parse_meta_imp(); }

  MetaPtr parse_meta_imp() {
    MetaPtr l = parse_meta_and();
    if (accept(Tok::MetaArrow)) return mk_metaimp(l, parse_meta_imp());
    return l;
  }

  MetaPtr parse_meta_and() {
    MetaPtr l = parse_meta_atom();
    while (accept(Tok::Amp)) l = mk_metaand(l, parse_meta_atom());
    return l;
  }

  MetaPtr parse_meta_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwValid:
        next();
        return mk_valid(parse_app());
      case Tok::KwValidD:
        next();
        return mk_validd(parse_app());
      case Tok::KwValidAt: {
        next();
        CharPtr ctx = parse_atom();
        return mk_atctx(ctx, parse_app());
      }
      case Tok::KwValidCtx: {
        next();
        CharPtr ctx = parse_atom();
        return mk_validctx(ctx, parse_app());
      }
      case Tok::KwForallCtx: {
        next();
        std::vector<Token> vars;
        vars.push_back(expect(Tok::Ident, "a context variable"));
        while (at(Tok::Ident)) vars.push_back(next());
        expect(Tok::Dot, "'.'");
        std::size_t mark = bound_.size();
        for (const auto& v : vars) bound_.push_back(v.text);
        MetaPtr body = parse_meta();
        bound_.resize(mark);
        for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
          body = mk_metaforallctx(it->text, body);
        }
        return body;
      }
      case Tok::LParen: {
        next();
        MetaPtr m = parse_meta();
        expect(Tok::RParen, "')'");
        return m;
      }
      default:
        fail("expected a validity judgement, 'forallctx' or '('");
    }
  }

  // --- character formulas ----------------------------------------------

  CharPtr parse_char() { return parse_iff(); }

  CharPtr parse_iff() {
    CharPtr l = parse_imp();
    if (accept(Tok::IffArrow)) return mk_binary(CharKind::Iff, l, parse_iff());
    return l;
  }

  CharPtr parse_imp() {
    CharPtr l = parse_or();
    if (accept(Tok::Arrow)) return mk_binary(CharKind::Imp, l, parse_imp());
    return l;
  }

  CharPtr parse_or() {
    CharPtr l = parse_and();
    while (accept(Tok::KwOr)) l = mk_binary(CharKind::Or, l, parse_and());
    return l;
  }

  CharPtr parse_and() {
    CharPtr l = parse_unary();
    while (accept(Tok::KwAnd)) l = mk_binary(CharKind::And, l, parse_unary());
    return l;
  }

  static CharKind prefix_kind(Tok t) {
    switch (t) {
      case Tok::KwNot: return CharKind::Not;
      case Tok::KwBoxA: return CharKind::BoxA;
      case Tok::KwDiaA: return CharKind::DiaA;
      case Tok::KwBoxP: return CharKind::BoxP;
      case Tok::KwDiaP: return CharKind::DiaP;
      case Tok::KwBoxD: return CharKind::BoxD;
      case Tok::KwOa: return CharKind::ObA;
      case Tok::KwOi: return CharKind::ObI;
      default: return CharKind::Top;
    }
  }

  static bool is_prefix(Tok t) {
    switch (t) {
      case Tok::KwNot:
      case Tok::KwBoxA:
      case Tok::KwDiaA:
      case Tok::KwBoxP:
      case Tok::KwDiaP:
      case Tok::KwBoxD:
      case Tok::KwOa:
      case Tok::KwOi:
        return true;
      default:
        return false;
    }
  }

  CharPtr parse_unary() {
    const Token& t = peek();
    if (is_prefix(t.kind)) {
      next();
      return mk_unary(prefix_kind(t.kind), parse_unary());
    }
    if (t.kind == Tok::KwForall || t.kind == Tok::KwExists) {
      return parse_quant();
    }
    return parse_app();
  }

  CharPtr parse_quant() {
    CharKind k = at(Tok::KwForall) ? CharKind::Forall : CharKind::Exists;
    next();
    Token v = expect(Tok::Ident, "a variable name");
    expect(Tok::Colon, "':'");
    Sort s = parse_sort(*theory_);
    expect(Tok::Dot, "'.'");
    bound_.push_back(v.text);
    CharPtr body = parse_char();
    bound_.pop_back();
    return mk_quant(k, v.text, s, body);
  }

  static bool starts_atom(Tok t) {
    switch (t) {
      case Tok::Ident:
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::LParen:
      case Tok::ODyadic:
        return true;
      default:
        return false;
    }
  }

  CharPtr parse_app() {
    CharPtr f = parse_atom();
    while (starts_atom(peek().kind)) f = mk_app(f, parse_atom());
    return f;
  }

  static bool is_sexpr_head(Tok t) {
    switch (t) {
      case Tok::KwNot:
      case Tok::KwAnd:
      case Tok::KwOr:
      case Tok::KwImp:
      case Tok::KwIff:
      case Tok::KwBoxA:
      case Tok::KwDiaA:
      case Tok::KwBoxP:
      case Tok::KwDiaP:
      case Tok::KwBoxD:
      case Tok::KwOa:
      case Tok::KwOi:
      case Tok::KwOd:
        return true;
      default:
        return false;
    }
  }

  CharPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        Token n = next();
        if (is_bound(n.text)) return mk_var(n.text, n.line, n.col);
        return mk_const(n.text, n.line, n.col);
      }
      case Tok::KwTrue:
        next();
        return mk_top();
      case Tok::KwFalse:
        next();
        return mk_bottom();
      case Tok::ODyadic: {
        next();
        CharPtr body = parse_char();
        expect(Tok::Pipe, "'|'");
        CharPtr cond = parse_char();
        expect(Tok::Gt, "'>'");
        return mk_binary(CharKind::ObDyadic, body, cond);
      }
      case Tok::LParen: {
        next();
        // A group opening with an operator keyword is usually ordinary
        // formula syntax — `(not A) and B`, `(boxD x <-> y)` — but the
        // head-applied spelling `(and A B)`, `(imp A B)`, `(Od A B)` is
        // also accepted.  Try the formula reading first and fall back to
        // the head-applied one, so both spellings work and infix operators
        // keep their meaning inside parentheses.
        if (is_sexpr_head(peek().kind)) {
          const std::size_t tok_mark = pos_;
          const std::size_t bound_mark = bound_.size();
          try {
            CharPtr f = parse_char();
            expect(Tok::RParen, "')'");
            return f;
          } catch (const ParseError&) {
            pos_ = tok_mark;
            bound_.resize(bound_mark);
          }
          CharPtr f = parse_sexpr_body();
          expect(Tok::RParen, "')'");
          return f;
        }
        CharPtr f = parse_char();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        fail("expected a formula");
    }
  }

  // Prefix fallback inside parentheses: (and A B C), (imp A B), (Od A B).
  CharPtr parse_sexpr_body() {
    Token h = next();
    std::vector<CharPtr> args;
    while (!at(Tok::RParen) && !at(Tok::Eof)) args.push_back(parse_atom());
    auto need = [&](std::size_t n) {
      if (args.size() != n) {
        throw ParseError("'" + h.text + "' takes " + std::to_string(n) +
                             " argument(s), got " + std::to_string(args.size()),
                         h.line, h.col);
      }
    };
    if (is_prefix(h.kind)) {
      need(1);
      return mk_unary(prefix_kind(h.kind), args[0]);
    }
    switch (h.kind) {
      case Tok::KwAnd:
      case Tok::KwOr: {
        if (args.size() < 2) {
          throw ParseError("'" + h.text + "' needs at least 2 arguments",
                           h.line, h.col);
        }
        CharKind k = h.kind == Tok::KwAnd ? CharKind::And : CharKind::Or;
        CharPtr out = args[0];
        for (std::size_t i = 1; i < args.size(); ++i) {
          out = mk_binary(k, out, args[i]);
        }
        return out;
      }
      case Tok::KwImp:
        need(2);
        return mk_binary(CharKind::Imp, args[0], args[1]);
      case Tok::KwIff:
        need(2);
        return mk_binary(CharKind::Iff, args[0], args[1]);
      case Tok::KwOd:
        need(2);
        return mk_binary(CharKind::ObDyadic, args[0], args[1]);
      default:
        throw ParseError("bad prefix-form head: " + h.text, h.line, h.col);
    }
  }
};

}  // namespace

Theory parse_theory(std::string_view text) { return Parser(text).run(); }

Theory parse_theory_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open theory file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_theory(ss.str());
}

Scope parse_scope_string(const std::string& text) {
  int nc = -1, ne = -1, nw = -1;
  std::size_t i = 0;
  while (i < text.size()) {
    char dim = text[i];
    if (i + 1 >= text.size() || text[i + 1] != '=') {
      throw std::invalid_argument("bad scope syntax, want c=I,e=J,w=K: " +
                                  text);
    }
    std::size_t j = i + 2, start = j;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
      ++j;
    if (j == start) {
      throw std::invalid_argument("bad scope syntax, want c=I,e=J,w=K: " +
                                  text);
    }
    int v = std::stoi(text.substr(start, j - start));
    if (dim == 'c' && nc < 0) {
      nc = v;
    } else if (dim == 'e' && ne < 0) {
      ne = v;
    } else if (dim == 'w' && nw < 0) {
      nw = v;
    } else {
      throw std::invalid_argument("scope needs each of c=, e=, w= once: " +
                                  text);
    }
    if (j < text.size()) {
      if (text[j] != ',') {
        throw std::invalid_argument("bad scope syntax, want c=I,e=J,w=K: " +
                                    text);
      }
      ++j;
    }
    i = j;
  }
  if (nc < 0 || ne < 0 || nw < 0) {
    throw std::invalid_argument("scope needs each of c=, e=, w=: " + text);
  }
  if (nc < 1 || ne < 1 || nw < 1) {
    throw std::invalid_argument("scope components must be >= 1: " + text);
  }
  return Scope(nc, ne, nw);
}

}  // namespace deonmf
