#include "elevator/syntax.hpp"

#include <map>

namespace elevator {

// ---- construction ----------------------------------------------------------

KindPtr kind_type(const Mode& m) {
  auto k = std::make_shared<Kind>();
  k->tag = Kind::Tag::Type;
  k->hi = m;
  return k;
}

KindPtr kind_up(const Mode& hi, const Mode& lo, Context ctx, KindPtr body) {
  auto k = std::make_shared<Kind>();
  k->tag = Kind::Tag::CtxUp;
  k->hi = hi;
  k->lo = lo;
  k->ctx = std::move(ctx);
  k->body = std::move(body);
  return k;
}

NeutralPtr neu_var(const std::string& name) {
  auto p = std::make_shared<Neutral>();
  p->tag = Neutral::Tag::Var;
  p->name = name;
  return p;
}

NeutralPtr neu_force(NeutralPtr head, Subst sub, const Mode& hi, const Mode& lo) {
  auto p = std::make_shared<Neutral>();
  p->tag = Neutral::Tag::Force;
  p->head = std::move(head);
  p->sub = std::move(sub);
  p->hi = hi;
  p->lo = lo;
  return p;
}

namespace {
std::shared_ptr<Type> new_type(Type::Tag tag, const Mode& m) {
  auto t = std::make_shared<Type>();
  t->tag = tag;
  t->mode = m;
  return t;
}
std::shared_ptr<Term> new_term(Term::Tag tag) {
  auto e = std::make_shared<Term>();
  e->tag = tag;
  return e;
}
}  // namespace

TypePtr ty_unit(const Mode& k) { return new_type(Type::Tag::Unit, k); }

TypePtr ty_neutral(NeutralPtr p, const Mode& k) {
  auto t = new_type(Type::Tag::Neutral, k);
  t->neutral = std::move(p);
  return t;
}

TypePtr ty_var(const std::string& name, const Mode& k) { return ty_neutral(neu_var(name), k); }

TypePtr ty_thunk(ErasedContext names, TypePtr body, const Mode& hi) {
  auto t = new_type(Type::Tag::Thunk, hi);
  t->names = std::move(names);
  t->hi = hi;
  t->lo = body ? body->mode : Mode{};
  t->body = std::move(body);
  return t;
}

TypePtr ty_up(const Mode& hi, const Mode& lo, Context ctx, TypePtr body) {
  auto t = new_type(Type::Tag::CtxUp, hi);
  t->hi = hi;
  t->lo = lo;
  t->ctx = std::move(ctx);
  t->body = std::move(body);
  return t;
}

TypePtr ty_down(const Mode& hi, const Mode& lo, TypePtr body) {
  auto t = new_type(Type::Tag::Down, lo);
  t->hi = hi;
  t->lo = lo;
  t->body = std::move(body);
  return t;
}

TypePtr ty_forall(const std::string& var, KindPtr kind, TypePtr body) {
  auto t = new_type(Type::Tag::Forall, body ? body->mode : Mode{});
  t->var = var;
  t->kind = std::move(kind);
  t->body = std::move(body);
  return t;
}

TypePtr ty_arrow(TypePtr dom, TypePtr cod) {
  auto t = new_type(Type::Tag::Arrow, dom ? dom->mode : Mode{});
  if (t->mode.empty() && cod) t->mode = cod->mode;
  t->body = std::move(dom);
  t->cod = std::move(cod);
  return t;
}

TypePtr ty_data(const std::string& name, const Mode& m, std::vector<TypePtr> args) {
  auto t = new_type(Type::Tag::Data, m);
  t->data_name = name;
  t->args = std::move(args);
  return t;
}

TermPtr tm_var(const std::string& x) {
  auto e = new_term(Term::Tag::Var);
  e->name = x;
  return e;
}

TermPtr tm_one(const Mode& k) {
  auto e = new_term(Term::Tag::One);
  e->hi = k;
  return e;
}

TermPtr tm_susp(const Mode& hi, const Mode& lo, ErasedContext names, TermPtr body) {
  auto e = new_term(Term::Tag::Susp);
  e->hi = hi;
  e->lo = lo;
  e->names = std::move(names);
  e->body = std::move(body);
  return e;
}

TermPtr tm_force(const Mode& hi, const Mode& lo, TermPtr head, Subst sub) {
  auto e = new_term(Term::Tag::Force);
  e->hi = hi;
  e->lo = lo;
  e->body = std::move(head);
  e->sub = std::move(sub);
  return e;
}

TermPtr tm_store(const Mode& hi, const Mode& lo, TermPtr body) {
  auto e = new_term(Term::Tag::Store);
  e->hi = hi;
  e->lo = lo;
  e->body = std::move(body);
  return e;
}

TermPtr tm_load(const Mode& hi, const Mode& lo, const std::string& x, TermPtr bound, TermPtr cont) {
  auto e = new_term(Term::Tag::Load);
  e->hi = hi;
  e->lo = lo;
  e->name = x;
  e->body = std::move(bound);
  e->cont = std::move(cont);
  return e;
}

TermPtr tm_tlam(const std::string& a, KindPtr kind, TermPtr body) {
  auto e = new_term(Term::Tag::TLam);
  e->name = a;
  e->kind = std::move(kind);
  e->body = std::move(body);
  return e;
}

TermPtr tm_tapp(TermPtr head, TypePtr arg) {
  auto e = new_term(Term::Tag::TApp);
  e->body = std::move(head);
  e->type = std::move(arg);
  return e;
}

TermPtr tm_lam(const std::string& x, TypePtr ann, TermPtr body) {
  auto e = new_term(Term::Tag::Lam);
  e->name = x;
  e->type = std::move(ann);
  e->body = std::move(body);
  return e;
}

TermPtr tm_app(TermPtr head, TermPtr arg) {
  auto e = new_term(Term::Tag::App);
  e->body = std::move(head);
  e->cont = std::move(arg);
  return e;
}

TermPtr tm_ctor(const std::string& data, const Mode& m, const std::string& ctor, std::vector<TermPtr> args) {
  auto e = new_term(Term::Tag::Ctor);
  e->data_name = data;
  e->hi = m;
  e->name = ctor;
  e->args = std::move(args);
  return e;
}

TermPtr tm_match(const Mode& m, TermPtr scrut, std::vector<Branch> branches) {
  auto e = new_term(Term::Tag::Match);
  e->hi = m;
  e->body = std::move(scrut);
  e->branches = std::move(branches);
  return e;
}

TermPtr tm_def(const std::string& name) {
  auto e = new_term(Term::Tag::Def);
  e->name = name;
  return e;
}

TermPtr tm_annot(TermPtr body, TypePtr type) {
  auto e = new_term(Term::Tag::Annot);
  e->body = std::move(body);
  e->type = std::move(type);
  return e;
}

Decl decl_type(const std::string& a, KindPtr k) {
  Decl d;
  d.sort = Sort::TypeVar;
  d.name = a;
  d.mode = k ? mode_of(k) : Mode{};
  d.kind = std::move(k);
  return d;
}

Decl decl_term(const std::string& x, TypePtr t) {
  Decl d;
  d.sort = Sort::TermVar;
  d.name = x;
  d.mode = t ? t->mode : Mode{};
  d.type = std::move(t);
  return d;
}

SubstEntry sub_type(const std::string& a, TypePtr t, DfKindPtr kind) {
  SubstEntry s;
  s.sort = Sort::TypeVar;
  s.name = a;
  s.mode = kind ? kind->hi : (t ? t->mode : Mode{});
  s.type = std::move(t);
  s.kind = std::move(kind);
  return s;
}

SubstEntry sub_term(const std::string& x, TermPtr e, const Mode& k) {
  SubstEntry s;
  s.sort = Sort::TermVar;
  s.name = x;
  s.term = std::move(e);
  s.mode = k;
  return s;
}

TermPtr with_span(TermPtr e, const SourceSpan& span) {
  return modify(e, [&](Term& t) { t.span = span; });
}

// ---- erasure -----------------------------------------------------------------

DfKindPtr df_type(const Mode& m) {
  auto k = std::make_shared<DfKind>();
  k->tag = DfKind::Tag::Type;
  k->hi = m;
  return k;
}

DfKindPtr erase_kind(const KindPtr& k) {
  if (!k) return nullptr;
  if (k->tag == Kind::Tag::Type) return df_type(k->hi);
  auto d = std::make_shared<DfKind>();
  d->tag = DfKind::Tag::CtxUp;
  d->hi = k->hi;
  d->lo = k->lo;
  d->ctx = erase_context(k->ctx);
  d->body = erase_kind(k->body);
  return d;
}

DfContext erase_context(const Context& ctx) {
  DfContext out;
  out.reserve(ctx.size());
  for (const auto& d : ctx) {
    if (d.sort == Sort::TypeVar) out.push_back({d.name, erase_kind(d.kind)});
    else out.push_back({d.name, nullptr});
  }
  return out;
}

ErasedContext names_of(const Context& ctx) {
  ErasedContext out;
  out.reserve(ctx.size());
  for (const auto& d : ctx) out.push_back(d.name);
  return out;
}

Mode mode_of(const KindPtr& k) { return k->hi; }

// ---- free variables ------------------------------------------------------------

namespace {

struct FvCollector {
  std::multiset<std::string> bound;
  std::set<std::string>& out;

  void var(const std::string& x) {
    if (!bound.count(x)) out.insert(x);
  }
  void bind(const std::string& x) { bound.insert(x); }
  void unbind(const std::string& x) { bound.erase(bound.find(x)); }

  void kind(const KindPtr& k) {
    if (!k || k->tag == Kind::Tag::Type) return;
    ctx_then(k->ctx, [&] { kind(k->body); });
  }

  template <class F>
  void ctx_then(const Context& ctx, F&& inner) {
    for (const auto& d : ctx) {
      if (d.kind) kind(d.kind);
      if (d.type) type(d.type);
      bind(d.name);
    }
    inner();
    for (const auto& d : ctx) unbind(d.name);
  }

  void subst(const Subst& s) {
    for (const auto& e : s) {
      if (e.type) type(e.type);
      if (e.term) term(e.term);
    }
  }

  void neutral(const NeutralPtr& p) {
    if (!p) return;
    if (p->tag == Neutral::Tag::Var) {
      var(p->name);
    } else {
      neutral(p->head);
      subst(p->sub);
    }
  }

  void type(const TypePtr& t) {
    if (!t) return;
    switch (t->tag) {
      case Type::Tag::Unit: break;
      case Type::Tag::Neutral: neutral(t->neutral); break;
      case Type::Tag::Thunk:
        for (const auto& n : t->names) bind(n);
        type(t->body);
        for (const auto& n : t->names) unbind(n);
        break;
      case Type::Tag::CtxUp: ctx_then(t->ctx, [&] { type(t->body); }); break;
      case Type::Tag::Down: type(t->body); break;
      case Type::Tag::Forall:
        kind(t->kind);
        bind(t->var);
        type(t->body);
        unbind(t->var);
        break;
      case Type::Tag::Arrow:
        type(t->body);
        type(t->cod);
        break;
      case Type::Tag::Data:
        for (const auto& a : t->args) type(a);
        break;
      case Type::Tag::Redex:
        type(t->body);
        subst(t->sub);
        break;
    }
  }

  void term(const TermPtr& e) {
    if (!e) return;
    switch (e->tag) {
      case Term::Tag::Var: var(e->name); break;
      case Term::Tag::One:
      case Term::Tag::Def: break;
      case Term::Tag::Susp:
        type(e->type);
        for (const auto& n : e->names) bind(n);
        term(e->body);
        for (const auto& n : e->names) unbind(n);
        break;
      case Term::Tag::Force:
        term(e->body);
        subst(e->sub);
        break;
      case Term::Tag::Store:
        type(e->type);
        term(e->body);
        break;
      case Term::Tag::Load:
        term(e->body);
        bind(e->name);
        term(e->cont);
        unbind(e->name);
        break;
      case Term::Tag::TLam:
        kind(e->kind);
        bind(e->name);
        term(e->body);
        unbind(e->name);
        break;
      case Term::Tag::TApp:
        term(e->body);
        type(e->type);
        break;
      case Term::Tag::Lam:
        type(e->type);
        bind(e->name);
        term(e->body);
        unbind(e->name);
        break;
      case Term::Tag::App:
        term(e->body);
        term(e->cont);
        break;
      case Term::Tag::Ctor:
        type(e->type);
        for (const auto& a : e->args) term(a);
        break;
      case Term::Tag::Match:
        term(e->body);
        for (const auto& b : e->branches) {
          for (const auto& x : b.binders) bind(x);
          term(b.body);
          for (const auto& x : b.binders) unbind(x);
        }
        break;
      case Term::Tag::Annot:
        term(e->body);
        type(e->type);
        break;
    }
  }
};

}  // namespace

void fv_into(const KindPtr& k, std::set<std::string>& out) { FvCollector{{}, out}.kind(k); }
void fv_into(const TypePtr& t, std::set<std::string>& out) { FvCollector{{}, out}.type(t); }
void fv_into(const NeutralPtr& p, std::set<std::string>& out) { FvCollector{{}, out}.neutral(p); }
void fv_into(const TermPtr& e, std::set<std::string>& out) { FvCollector{{}, out}.term(e); }
void fv_into(const Subst& s, std::set<std::string>& out) { FvCollector{{}, out}.subst(s); }

std::set<std::string> fv(const KindPtr& k) { std::set<std::string> s; fv_into(k, s); return s; }
std::set<std::string> fv(const TypePtr& t) { std::set<std::string> s; fv_into(t, s); return s; }
std::set<std::string> fv(const NeutralPtr& p) { std::set<std::string> s; fv_into(p, s); return s; }
std::set<std::string> fv(const TermPtr& e) { std::set<std::string> s; fv_into(e, s); return s; }
std::set<std::string> fv(const Subst& x) { std::set<std::string> s; fv_into(x, s); return s; }

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  while (!stem.empty() && (stem.back() == '\'' || std::isdigit(static_cast<unsigned char>(stem.back()))))
    stem.pop_back();
  if (stem.empty()) stem = "v";
  for (int primes = 1; primes <= 2; ++primes) {
    std::string cand = stem + std::string(primes, '\'');
    if (!avoid.count(cand)) return cand;
  }
  for (int i = 1;; ++i) {
    std::string cand = stem + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// ---- alpha equivalence -----------------------------------------------------

namespace {

class Alpha {
 public:
  bool kind(const KindPtr& a, const KindPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->tag != b->tag || a->hi != b->hi) return false;
    if (a->tag == Kind::Tag::Type) return true;
    if (a->lo != b->lo) return false;
    return ctx_then(a->ctx, b->ctx, [&] { return kind(a->body, b->body); });
  }

  template <class F>
  bool ctx_then(const Context& a, const Context& b, F&& inner) {
    if (a.size() != b.size()) return false;
    size_t bound = 0;
    bool ok = true;
    for (size_t i = 0; i < a.size() && ok; ++i) {
      const auto& x = a[i];
      const auto& y = b[i];
      ok = x.sort == y.sort && x.mode == y.mode && kind(x.kind, y.kind) && type(x.type, y.type);
      if (ok) {
        bind(x.name, y.name);
        ++bound;
      }
    }
    if (ok) ok = inner();
    for (size_t i = bound; i-- > 0;) unbind(a[i].name, b[i].name);
    return ok;
  }

  template <class F>
  bool names_then(const std::vector<std::string>& a, const std::vector<std::string>& b, F&& inner) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) bind(a[i], b[i]);
    bool ok = inner();
    for (size_t i = a.size(); i-- > 0;) unbind(a[i], b[i]);
    return ok;
  }

  bool var(const std::string& x, const std::string& y) {
    auto lx = left_.find(x);
    auto ry = right_.find(y);
    bool bx = lx != left_.end() && !lx->second.empty();
    bool by = ry != right_.end() && !ry->second.empty();
    if (bx != by) return false;
    if (!bx) return x == y;
    return lx->second.back() == ry->second.back();
  }

  bool subst(const Subst& a, const Subst& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].sort != b[i].sort || a[i].mode != b[i].mode) return false;
      if (!type(a[i].type, b[i].type) || !term(a[i].term, b[i].term)) return false;
    }
    return true;
  }

  bool neutral(const NeutralPtr& a, const NeutralPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->tag != b->tag) return false;
    if (a->tag == Neutral::Tag::Var) return var(a->name, b->name);
    return a->hi == b->hi && a->lo == b->lo && neutral(a->head, b->head) && subst(a->sub, b->sub);
  }

  bool type(const TypePtr& a, const TypePtr& b) {
    if (!a || !b) return !a && !b;
    if (a->tag != b->tag || a->mode != b->mode) return false;
    switch (a->tag) {
      case Type::Tag::Unit: return true;
      case Type::Tag::Neutral: return neutral(a->neutral, b->neutral);
      case Type::Tag::Thunk:
        return a->hi == b->hi && names_then(a->names, b->names, [&] { return type(a->body, b->body); });
      case Type::Tag::CtxUp:
        return a->hi == b->hi && a->lo == b->lo &&
               ctx_then(a->ctx, b->ctx, [&] { return type(a->body, b->body); });
      case Type::Tag::Down: return a->hi == b->hi && a->lo == b->lo && type(a->body, b->body);
      case Type::Tag::Forall:
        return kind(a->kind, b->kind) && names_then({a->var}, {b->var}, [&] { return type(a->body, b->body); });
      case Type::Tag::Arrow: return type(a->body, b->body) && type(a->cod, b->cod);
      case Type::Tag::Data:
        if (a->data_name != b->data_name || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (!type(a->args[i], b->args[i])) return false;
        return true;
      case Type::Tag::Redex: return type(a->body, b->body) && subst(a->sub, b->sub);
    }
    return false;
  }

  bool term(const TermPtr& a, const TermPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->tag != b->tag) return false;
    switch (a->tag) {
      case Term::Tag::Var: return var(a->name, b->name);
      case Term::Tag::One: return a->hi == b->hi;
      case Term::Tag::Def: return a->name == b->name;
      case Term::Tag::Susp:
        return a->hi == b->hi && a->lo == b->lo &&
               names_then(a->names, b->names, [&] { return term(a->body, b->body); });
      case Term::Tag::Force:
        return a->hi == b->hi && a->lo == b->lo && term(a->body, b->body) && subst(a->sub, b->sub);
      case Term::Tag::Store: return a->hi == b->hi && a->lo == b->lo && term(a->body, b->body);
      case Term::Tag::Load:
        return a->hi == b->hi && a->lo == b->lo && term(a->body, b->body) &&
               names_then({a->name}, {b->name}, [&] { return term(a->cont, b->cont); });
      case Term::Tag::TLam:
        return kind(a->kind, b->kind) && names_then({a->name}, {b->name}, [&] { return term(a->body, b->body); });
      case Term::Tag::TApp: return term(a->body, b->body) && type(a->type, b->type);
      case Term::Tag::Lam:
        return type(a->type, b->type) && names_then({a->name}, {b->name}, [&] { return term(a->body, b->body); });
      case Term::Tag::App: return term(a->body, b->body) && term(a->cont, b->cont);
      case Term::Tag::Ctor:
        if (a->name != b->name || a->hi != b->hi || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (!term(a->args[i], b->args[i])) return false;
        return true;
      case Term::Tag::Match:
        if (a->hi != b->hi || a->branches.size() != b->branches.size() || !term(a->body, b->body)) return false;
        for (size_t i = 0; i < a->branches.size(); ++i) {
          const auto& x = a->branches[i];
          const auto& y = b->branches[i];
          if (x.ctor != y.ctor) return false;
          if (!names_then(x.binders, y.binders, [&] { return term(x.body, y.body); })) return false;
        }
        return true;
      case Term::Tag::Annot: return term(a->body, b->body) && type(a->type, b->type);
    }
    return false;
  }

  bool dfkind(const DfKindPtr& a, const DfKindPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->tag != b->tag || a->hi != b->hi) return false;
    if (a->tag == DfKind::Tag::Type) return true;
    if (a->lo != b->lo || a->ctx.size() != b->ctx.size()) return false;
    for (size_t i = 0; i < a->ctx.size(); ++i)
      if (!dfkind(a->ctx[i].kind, b->ctx[i].kind)) return false;
    return dfkind(a->body, b->body);
  }

 private:
  void bind(const std::string& x, const std::string& y) {
    int id = next_++;
    left_[x].push_back(id);
    right_[y].push_back(id);
  }
  void unbind(const std::string& x, const std::string& y) {
    left_[x].pop_back();
    right_[y].pop_back();
  }

  std::map<std::string, std::vector<int>> left_, right_;
  int next_ = 0;
};

}  // namespace

bool alpha_eq(const KindPtr& a, const KindPtr& b) { return Alpha{}.kind(a, b); }
bool alpha_eq(const TypePtr& a, const TypePtr& b) { return Alpha{}.type(a, b); }
bool alpha_eq(const NeutralPtr& a, const NeutralPtr& b) { return Alpha{}.neutral(a, b); }
bool alpha_eq(const TermPtr& a, const TermPtr& b) { return Alpha{}.term(a, b); }
bool alpha_eq(const Subst& a, const Subst& b) { return Alpha{}.subst(a, b); }
bool alpha_eq(const DfKindPtr& a, const DfKindPtr& b) { return Alpha{}.dfkind(a, b); }
bool alpha_eq(const Context& a, const Context& b) {
  Alpha al;
  return al.ctx_then(a, b, [] { return true; });
}

// ---- structure -----------------------------------------------------------------

namespace {
size_t size_subst(const Subst& s) {
  size_t n = 0;
  for (const auto& e : s) n += (e.type ? size(e.type) : 0) + (e.term ? size(e.term) : 0);
  return n;
}
size_t size_ctx(const Context& c) {
  size_t n = 0;
  for (const auto& d : c) n += 1 + (d.kind ? size(d.kind) : 0) + (d.type ? size(d.type) : 0);
  return n;
}
}  // namespace

size_t size(const KindPtr& k) {
  if (!k) return 0;
  if (k->tag == Kind::Tag::Type) return 1;
  return 1 + size_ctx(k->ctx) + size(k->body);
}

size_t size(const NeutralPtr& p) {
  if (!p) return 0;
  if (p->tag == Neutral::Tag::Var) return 1;
  return 1 + size(p->head) + size_subst(p->sub);
}

size_t size(const TypePtr& t) {
  if (!t) return 0;
  size_t n = 1;
  switch (t->tag) {
    case Type::Tag::Unit: break;
    case Type::Tag::Neutral: n += size(t->neutral) - 1; break;
    case Type::Tag::Thunk:
    case Type::Tag::Down: n += size(t->body); break;
    case Type::Tag::CtxUp: n += size_ctx(t->ctx) + size(t->body); break;
    case Type::Tag::Forall: n += size(t->kind) + size(t->body); break;
    case Type::Tag::Arrow: n += size(t->body) + size(t->cod); break;
    case Type::Tag::Data:
      for (const auto& a : t->args) n += size(a);
      break;
    case Type::Tag::Redex: n += size(t->body) + size_subst(t->sub); break;
  }
  return n;
}

size_t size(const TermPtr& e) {
  if (!e) return 0;
  size_t n = 1 + size(e->body) + size(e->cont) + size_subst(e->sub) + size(e->kind) + size(e->type);
  for (const auto& a : e->args) n += size(a);
  for (const auto& b : e->branches) n += size(b.body);
  return n;
}

namespace {
bool redex_in_subst(const Subst& s) {
  for (const auto& e : s)
    if ((e.type && has_type_redex(e.type)) || (e.term && has_type_redex(e.term))) return true;
  return false;
}
bool redex_in_kind(const KindPtr& k);
bool redex_in_ctx(const Context& c) {
  for (const auto& d : c)
    if ((d.kind && redex_in_kind(d.kind)) || (d.type && has_type_redex(d.type))) return true;
  return false;
}
bool redex_in_kind(const KindPtr& k) {
  if (!k || k->tag == Kind::Tag::Type) return false;
  return redex_in_ctx(k->ctx) || redex_in_kind(k->body);
}
bool redex_in_neutral(const NeutralPtr& p) {
  if (!p || p->tag == Neutral::Tag::Var) return false;
  return !p->head || redex_in_neutral(p->head) || redex_in_subst(p->sub);
}
}  // namespace

bool has_type_redex(const TypePtr& t) {
  if (!t) return false;
  switch (t->tag) {
    case Type::Tag::Redex: return true;
    case Type::Tag::Unit: return false;
    case Type::Tag::Neutral: return redex_in_neutral(t->neutral);
    case Type::Tag::Thunk:
    case Type::Tag::Down: return has_type_redex(t->body);
    case Type::Tag::CtxUp: return redex_in_ctx(t->ctx) || has_type_redex(t->body);
    case Type::Tag::Forall: return redex_in_kind(t->kind) || has_type_redex(t->body);
    case Type::Tag::Arrow: return has_type_redex(t->body) || has_type_redex(t->cod);
    case Type::Tag::Data:
      for (const auto& a : t->args)
        if (has_type_redex(a)) return true;
      return false;
  }
  return false;
}

bool has_type_redex(const TermPtr& e) {
  if (!e) return false;
  if (has_type_redex(e->body) || has_type_redex(e->cont) || redex_in_subst(e->sub) || redex_in_kind(e->kind) ||
      has_type_redex(e->type))
    return true;
  for (const auto& a : e->args)
    if (has_type_redex(a)) return true;
  for (const auto& b : e->branches)
    if (has_type_redex(b.body)) return true;
  return false;
}

// ---- mode rewriting ------------------------------------------------------------

namespace {
using ModeFn = std::function<Mode(const Mode&)>;

Mode mm(const Mode& m, const ModeFn& f) { return m.empty() ? m : f(m); }

Context map_ctx(const Context& c, const ModeFn& f);
Subst map_subst(const Subst& s, const ModeFn& f);

NeutralPtr map_neutral(const NeutralPtr& p, const ModeFn& f) {
  if (!p || p->tag == Neutral::Tag::Var) return p;
  return neu_force(map_neutral(p->head, f), map_subst(p->sub, f), mm(p->hi, f), mm(p->lo, f));
}

Subst map_subst(const Subst& s, const ModeFn& f) {
  Subst out = s;
  for (auto& e : out) {
    e.mode = mm(e.mode, f);
    if (e.type) e.type = map_modes(e.type, f);
    // Terms inside data declarations never occur; leave them untouched.
  }
  return out;
}

Context map_ctx(const Context& c, const ModeFn& f) {
  Context out = c;
  for (auto& d : out) {
    d.mode = mm(d.mode, f);
    if (d.kind) d.kind = map_modes(d.kind, f);
    if (d.type) d.type = map_modes(d.type, f);
  }
  return out;
}
}  // namespace

KindPtr map_modes(const KindPtr& k, const ModeFn& f) {
  if (!k) return k;
  auto out = std::make_shared<Kind>(*k);
  out->hi = mm(k->hi, f);
  out->lo = mm(k->lo, f);
  out->ctx = map_ctx(k->ctx, f);
  out->body = map_modes(k->body, f);
  return out;
}

TypePtr map_modes(const TypePtr& t, const ModeFn& f) {
  if (!t) return t;
  auto out = std::make_shared<Type>(*t);
  out->mode = mm(t->mode, f);
  out->hi = mm(t->hi, f);
  out->lo = mm(t->lo, f);
  out->neutral = map_neutral(t->neutral, f);
  out->ctx = map_ctx(t->ctx, f);
  out->body = map_modes(t->body, f);
  out->cod = map_modes(t->cod, f);
  out->kind = map_modes(t->kind, f);
  for (auto& a : out->args) a = map_modes(a, f);
  out->sub = map_subst(t->sub, f);
  return out;
}

}  // namespace elevator
