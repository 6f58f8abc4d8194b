#include <memory>

#include "elevator/frontend.hpp"

namespace elevator {

namespace {

TypePtr ty_redex(TypePtr head, Subst sub, const SourceSpan& span) {
  auto t = std::make_shared<Type>();
  t->tag = Type::Tag::Redex;
  t->body = std::move(head);
  t->sub = std::move(sub);
  t->span = span;
  return t;
}

TypePtr at(TypePtr t, const SourceSpan& span) {
  return modify(t, [&](Type& x) { x.span = span; });
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  SurfaceModule module() {
    SurfaceModule m;
    m.file = file_;
    while (!at_end()) {
      if (is_kw("modes")) {
        m.pragma_span = span();
        next();
        if (peek().kind != Token::Kind::String) fail("a quoted spec path");
        m.modes_pragma = next().text;
      } else if (is_kw("data")) {
        m.datas.push_back(data());
      } else if (is_kw("def")) {
        m.defs.push_back(def());
      } else {
        fail("'def', 'data' or 'modes'");
      }
    }
    return m;
  }

  template <class F>
  auto whole(F&& f) {
    auto r = f();
    if (!at_end()) fail("end of input");
    return r;
  }

  // ---- items ---------------------------------------------------------------

  SurfaceData data() {
    SurfaceData d;
    d.decl.span = span();
    expect_kw("data");
    d.decl.name = ident("a data type name");
    expect("{");
    d.mode_param = ident("a mode parameter");
    expect("}");
    while (accept("(")) {
      std::string p = ident("a parameter name");
      expect(":");
      KindPtr k = kind();
      expect(")");
      d.decl.params.push_back({p, k});
    }
    expect("=");
    accept("|");
    do {
      CtorDecl c;
      c.name = ident("a constructor name");
      while (type_atom_start()) c.args.push_back(type_atom());
      d.decl.ctors.push_back(std::move(c));
    } while (accept("|"));
    return d;
  }

  DefDecl def() {
    DefDecl d;
    d.span = span();
    expect_kw("def");
    d.name = ident("a definition name");
    expect(":");
    d.type = type();
    expect("=");
    d.body = term();
    return d;
  }

  // ---- kinds and contexts ----------------------------------------------------

  KindPtr kind() {
    if (is_kw("Type")) {
      next();
      expect("@");
      return kind_type(mode());
    }
    if (is_kw("Up")) {
      next();
      auto [hi, lo] = mode_pair();
      expect("[");
      Context ctx = context();
      expect("|-");
      KindPtr body = kind();
      expect("]");
      return kind_up(hi, lo, std::move(ctx), body);
    }
    if (accept("(")) {
      KindPtr k = kind();
      expect(")");
      return k;
    }
    fail("a kind");
  }

  Context context() {
    Context ctx;
    if (is_sym("|-")) return ctx;
    do {
      std::string name = ident("a declared name");
      expect(":");
      size_t save = pos_;
      try {
        KindPtr k = kind();
        if (!is_sym(",") && !is_sym("|-")) fail("',' or '|-'");
        ctx.push_back(decl_type(name, k));
        continue;
      } catch (const Error&) {
        pos_ = save;
      }
      ctx.push_back(decl_term(name, type()));
    } while (accept(","));
    return ctx;
  }

  // ---- types ---------------------------------------------------------------

  TypePtr type() {
    SourceSpan sp = span();
    if (is_kw("forall")) {
      next();
      std::string a = ident("a type variable");
      expect(":");
      KindPtr k = kind();
      expect(".");
      return at(ty_forall(a, k, type()), sp);
    }
    TypePtr lhs = type_app();
    if (accept("->") || accept("-o")) return at(ty_arrow(lhs, type()), sp);
    return lhs;
  }

  TypePtr type_app() {
    SourceSpan sp = span();
    if (is_kw("Down")) {
      next();
      auto [hi, lo] = mode_pair();
      return at(ty_down(hi, lo, type_app()), sp);
    }
    if (peek().kind == Token::Kind::Ident && peek(1).text == "{" ) {
      std::string d = next().text;
      expect("{");
      Mode m = mode();
      expect("}");
      std::vector<TypePtr> args;
      while (type_atom_start()) args.push_back(type_atom());
      return at(ty_data(d, m, std::move(args)), sp);
    }
    return type_atom();
  }

  bool type_atom_start() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) return true;
    if (t.kind == Token::Kind::Keyword)
      return t.text == "Unit" || t.text == "Up" || t.text == "force" || t.text == "thunk";
    return t.kind == Token::Kind::Symbol && t.text == "(";
  }

  TypePtr type_atom() {
    SourceSpan sp = span();
    if (is_kw("Unit")) {
      next();
      expect("@");
      return at(ty_unit(mode()), sp);
    }
    if (is_kw("Up")) {
      next();
      auto [hi, lo] = mode_pair();
      expect("[");
      Context ctx = context();
      expect("|-");
      TypePtr body = type();
      expect("]");
      return at(ty_up(hi, lo, std::move(ctx), body), sp);
    }
    if (is_kw("force")) {
      next();
      TypePtr head = type_atom();
      expect("@");
      Subst sub = subst_args();
      if (head->tag == Type::Tag::Neutral) return at(ty_neutral(neu_force(head->neutral, std::move(sub), "", ""), ""), sp);
      return ty_redex(head, std::move(sub), sp);
    }
    if (is_kw("thunk")) {
      next();
      expect("(");
      ErasedContext names = binder_names();
      TypePtr body = type();
      expect(")");
      return at(ty_thunk(std::move(names), body, ""), sp);
    }
    if (peek().kind == Token::Kind::Ident) {
      std::string name = next().text;
      if (accept("{")) {
        Mode m = mode();
        expect("}");
        return at(ty_data(name, m, {}), sp);
      }
      return at(ty_var(name, ""), sp);
    }
    if (accept("(")) {
      TypePtr t = type();
      expect(")");
      return t;
    }
    fail("a type");
  }

  // ---- terms ---------------------------------------------------------------

  TermPtr term() {
    SourceSpan sp = span();
    if (accept("\\")) {
      std::string x = ident("a variable");
      TypePtr ann;
      if (accept(":")) ann = type();
      expect(".");
      return with_span(tm_lam(x, ann, term()), sp);
    }
    if (accept("/\\")) {
      std::string a = ident("a type variable");
      KindPtr k;
      if (accept(":")) k = kind();
      expect(".");
      return with_span(tm_tlam(a, k, term()), sp);
    }
    if (is_kw("load")) {
      next();
      std::string x = ident("a variable");
      expect("=");
      TermPtr bound = term();
      expect_kw("in");
      return with_span(tm_load("", "", x, bound, term()), sp);
    }
    if (is_kw("match")) {
      next();
      TermPtr scrut = term();
      expect_kw("with");
      std::vector<Branch> branches;
      accept("|");
      do {
        Branch b;
        b.ctor = ident("a constructor pattern");
        if (accept("{")) {
          mode();
          expect("}");
        }
        while (peek().kind == Token::Kind::Ident) b.binders.push_back(next().text);
        expect("=>");
        b.body = term();
        branches.push_back(std::move(b));
      } while (accept("|"));
      return with_span(tm_match("", scrut, std::move(branches)), sp);
    }
    return term_app();
  }

  TermPtr term_app() {
    SourceSpan sp = span();
    if (is_kw("store")) {
      next();
      return with_span(tm_store("", "", term_app()), sp);
    }
    if (peek().kind == Token::Kind::Ident && peek(1).text == "{") {
      std::string c = next().text;
      expect("{");
      Mode m = mode();
      expect("}");
      std::vector<TermPtr> args;
      while (term_atom_start()) args.push_back(term_atom());
      return with_span(tm_ctor("", m, c, std::move(args)), sp);
    }
    TermPtr head = term_atom();
    while (true) {
      if (is_sym("[")) {
        next();
        TypePtr a = type();
        expect("]");
        head = with_span(tm_tapp(head, a), sp);
      } else if (term_atom_start()) {
        head = with_span(tm_app(head, term_atom()), sp);
      } else {
        return head;
      }
    }
  }

  bool term_atom_start() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Number) return true;
    if (t.kind == Token::Kind::Keyword) return t.text == "unit" || t.text == "susp" || t.text == "force";
    return t.kind == Token::Kind::Symbol && t.text == "(";
  }

  TermPtr term_atom() {
    SourceSpan sp = span();
    if (is_kw("unit")) {
      next();
      Mode m;
      if (accept("@")) m = mode();
      return with_span(tm_one(m), sp);
    }
    if (peek().kind == Token::Kind::Number) {
      const std::string digits = next().text;
      Mode m;
      if (accept("@")) m = mode();
      if (digits.size() > 6) fail("a literal below 1000000");
      long n = std::stol(digits);
      TermPtr e = tm_ctor("Nat", m, "Zero", {});
      for (long i = 0; i < n; ++i) e = tm_ctor("Nat", m, "Succ", {e});
      return with_span(e, sp);
    }
    if (is_kw("susp")) {
      next();
      expect("(");
      ErasedContext names = binder_names();
      TermPtr body = term();
      expect(")");
      return with_span(tm_susp("", "", std::move(names), body), sp);
    }
    if (is_kw("force")) {
      next();
      TermPtr head = term_atom();
      expect("@");
      Subst sub = subst_args();
      return with_span(tm_force("", "", head, std::move(sub)), sp);
    }
    if (peek().kind == Token::Kind::Ident) {
      std::string x = next().text;
      if (accept("{")) {
        Mode m = mode();
        expect("}");
        return with_span(tm_ctor("", m, x, {}), sp);
      }
      return with_span(tm_var(x), sp);
    }
    if (accept("(")) {
      TermPtr e = term();
      if (accept(":")) {
        TypePtr t = type();
        expect(")");
        return with_span(tm_annot(e, t), sp);
      }
      expect(")");
      return e;
    }
    fail("a term");
  }

  // `x1, ..., xn .`, or just `.`; absent entirely means no names.
  ErasedContext binder_names() {
    ErasedContext names;
    if (accept(".")) return names;
    size_t i = pos_;
    while (true) {
      if (toks_[i].kind != Token::Kind::Ident) return names;
      ++i;
      if (toks_[i].kind == Token::Kind::Symbol && toks_[i].text == ".") break;
      if (toks_[i].kind != Token::Kind::Symbol || toks_[i].text != ",") return names;
      ++i;
    }
    while (true) {
      names.push_back(next().text);
      if (accept(".")) return names;
      expect(",");
    }
  }

  // Each argument is read both as a term and as a type; the checker picks by
  // the sort of the declaration it instantiates.
  Subst subst_args() {
    Subst sub;
    expect("(");
    if (accept(")")) return sub;
    do {
      size_t start = pos_;
      SubstEntry entry;
      entry.sort = Sort::Either;
      size_t end_term = 0, end_type = 0;
      std::optional<Error> term_err;
      try {
        entry.term = term();
        if (!is_sym(",") && !is_sym(")")) fail("',' or ')'");
        end_term = pos_;
      } catch (const Error& e) {
        entry.term.reset();
        term_err = e;
      }
      pos_ = start;
      try {
        entry.type = type();
        if (!is_sym(",") && !is_sym(")")) fail("',' or ')'");
        end_type = pos_;
      } catch (const Error&) {
        entry.type.reset();
      }
      if (!entry.term && !entry.type) throw *term_err;
      if (entry.term && entry.type && end_term != end_type) {
        if (end_term > end_type) entry.type.reset();
        else entry.term.reset();
      }
      if (!entry.term) entry.sort = Sort::TypeVar;
      else if (!entry.type) entry.sort = Sort::TermVar;
      pos_ = entry.term ? end_term : end_type;
      sub.push_back(std::move(entry));
    } while (accept(","));
    expect(")");
    return sub;
  }

  // ---- tokens --------------------------------------------------------------

  Mode mode() { return ident("a mode"); }

  std::pair<Mode, Mode> mode_pair() {
    expect("<");
    Mode hi = mode();
    expect(",");
    Mode lo = mode();
    expect(">");
    return {hi, lo};
  }

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_sym(const char* s) const { return peek().kind == Token::Kind::Symbol && peek().text == s; }
  bool is_kw(const char* s) const { return peek().kind == Token::Kind::Keyword && peek().text == s; }
  bool accept(const char* s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("'") + s + "'");
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail(std::string("'") + s + "'");
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(what);
    return next().text;
  }
  SourceSpan span() const { return {file_, peek().line, peek().col}; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw Error(codes::kParse, "expected " + expected + ", found " + describe(peek()), span());
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::string file_;
};

}  // namespace

SurfaceModule parse(const std::string& source, const std::string& file) {
  Parser p(lex(source, file), file);
  return p.module();
}

TermPtr parse_term(const std::string& source) {
  Parser p(lex(source), "");
  return p.whole([&] { return p.term(); });
}

TypePtr parse_type(const std::string& source) {
  Parser p(lex(source), "");
  return p.whole([&] { return p.type(); });
}

KindPtr parse_kind(const std::string& source) {
  Parser p(lex(source), "");
  return p.whole([&] { return p.kind(); });
}

}  // namespace elevator
