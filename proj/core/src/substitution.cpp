#include "elevator/substitution.hpp"

#include <map>
#include <optional>

namespace elevator {

UsageMask empty_usage(const Context& ctx) { return UsageMask(ctx.size(), false); }

UsageMask merge_usage(const Context& ctx, const ModeSpec& spec, const UsageMask& u1, const UsageMask& u2) {
  if (u1.size() != ctx.size() || u2.size() != ctx.size())
    throw Error(codes::kSplit, "usage masks do not match the context");
  UsageMask out(ctx.size(), false);
  for (size_t i = 0; i < ctx.size(); ++i) {
    if (u1[i] && u2[i] && ctx[i].sort == Sort::TermVar && !spec.allows(ctx[i].mode, StructRule::Contraction))
      throw Error(codes::kSplit, "variable '" + ctx[i].name + "' at mode " + ctx[i].mode +
                                     " is used on both sides of a split but its mode has no contraction");
    out[i] = u1[i] || u2[i];
  }
  return out;
}

UsageMask merge_subst_usage(const Subst& sigma, const ModeSpec& spec, const UsageMask& u1, const UsageMask& u2) {
  if (u1.size() != sigma.size() || u2.size() != sigma.size())
    throw Error(codes::kSplit, "usage masks do not match the substitution");
  UsageMask out(sigma.size(), false);
  for (size_t i = 0; i < sigma.size(); ++i) {
    if (u1[i] && u2[i] && sigma[i].sort == Sort::TermVar &&
        !spec.allows(sigma[i].mode, StructRule::Contraction))
      throw Error(codes::kSplit, "entry '" + sigma[i].name + "' at mode " + sigma[i].mode +
                                     " is claimed by both halves but its mode has no contraction");
    out[i] = u1[i] || u2[i];
  }
  return out;
}

std::pair<Subst, Subst> split_substitution(const Subst& sigma, const ModeSpec& spec, const UsageMask& left,
                                           const UsageMask& right) {
  merge_subst_usage(sigma, spec, left, right);
  Subst l, r;
  for (size_t i = 0; i < sigma.size(); ++i) {
    const auto& e = sigma[i];
    if (e.sort != Sort::TermVar) {
      l.push_back(e);
      r.push_back(e);
      continue;
    }
    if (left[i] || !right[i]) l.push_back(e);
    if (right[i]) r.push_back(e);
  }
  return {l, r};
}

DfContext measure_of(const Subst& sigma) {
  DfContext g;
  for (const auto& e : sigma) g.push_back({e.name, e.sort == Sort::TermVar ? nullptr : e.kind});
  return g;
}

namespace {

struct Entry {
  enum class Tag { Type, Term, Rename };
  Tag tag;
  TypePtr type;
  DfKindPtr kind;
  TermPtr term;
  std::string rename;
};

class Substituter {
 public:
  Substituter(const Subst& sigma, const DfContext& gamma, SubstWatch* watch) : watch_(watch) {
    for (const auto& g : gamma) gamma_[g.name] = g.kind;
    for (const auto& s : sigma) {
      Entry en;
      if (s.sort == Sort::TermVar) {
        en.tag = Entry::Tag::Term;
        en.term = s.term;
        if (s.term) fv_into(s.term, range_);
      } else {
        en.tag = Entry::Tag::Type;
        en.type = s.type;
        en.kind = s.kind;
        if (s.type) fv_into(s.type, range_);
      }
      env_[s.name] = std::move(en);
    }
  }

  Substituter(std::map<std::string, Entry> env, std::map<std::string, DfKindPtr> gamma, SubstWatch* watch,
              size_t depth)
      : env_(std::move(env)), gamma_(std::move(gamma)), watch_(watch), depth_(depth) {
    for (const auto& [_, en] : env_) {
      if (en.type) fv_into(en.type, range_);
      if (en.term) fv_into(en.term, range_);
    }
  }

  TypePtr type(const TypePtr& t) {
    Depth d(*this);
    if (!t) return t;
    switch (t->tag) {
      case Type::Tag::Unit: return t;
      case Type::Tag::Neutral: {
        auto r = neutral(t->neutral);
        if (r.reduced) return r.type;
        if (r.neutral == t->neutral) return t;
        return ty_neutral(r.neutral, t->mode);
      }
      case Type::Tag::Thunk: {
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(t);
        for (const auto& n : t->names) scope_fv.insert(n);
        ErasedContext names;
        for (const auto& n : t->names) names.push_back(sc.enter(n, scope_fv));
        auto body = type(t->body);
        return modify(t, [&](Type& o) {
          o.names = names;
          o.body = body;
        });
      }
      case Type::Tag::CtxUp: {
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(t);
        for (const auto& d : t->ctx) scope_fv.insert(d.name);
        Context ctx = context_in(t->ctx, sc, scope_fv);
        auto body = type(t->body);
        return modify(t, [&](Type& o) {
          o.ctx = std::move(ctx);
          o.body = body;
        });
      }
      case Type::Tag::Down: {
        auto body = type(t->body);
        return modify(t, [&](Type& o) { o.body = body; });
      }
      case Type::Tag::Forall: {
        auto k = kind(t->kind);
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(t);
        scope_fv.insert(t->var);
        auto v = sc.enter(t->var, scope_fv);
        auto body = type(t->body);
        return modify(t, [&](Type& o) {
          o.kind = k;
          o.var = v;
          o.body = body;
        });
      }
      case Type::Tag::Arrow: {
        auto dom = type(t->body);
        auto cod = type(t->cod);
        return modify(t, [&](Type& o) {
          o.body = dom;
          o.cod = cod;
        });
      }
      case Type::Tag::Data: {
        std::vector<TypePtr> args;
        for (const auto& a : t->args) args.push_back(type(a));
        return modify(t, [&](Type& o) { o.args = std::move(args); });
      }
      case Type::Tag::Redex: throw Error(codes::kSubst, "unelaborated type redex reached substitution");
    }
    return t;
  }

  NeutralResult neutral(const NeutralPtr& p) {
    Depth d(*this);
    NeutralResult r;
    if (p->tag == Neutral::Tag::Var) {
      auto it = env_.find(p->name);
      if (it == env_.end()) {
        r.neutral = p;
        return r;
      }
      const Entry& en = it->second;
      switch (en.tag) {
        case Entry::Tag::Rename: r.neutral = neu_var(en.rename); return r;
        case Entry::Tag::Term:
          throw Error(codes::kSubst, "type variable '" + p->name + "' is mapped to a term");
        case Entry::Tag::Type: {
          r.reduced = true;
          r.type = en.type;
          auto g = gamma_.find(p->name);
          r.kind = (g != gamma_.end() && g->second) ? g->second : en.kind;
          if (!r.kind) throw Error(codes::kSubst, "no measure recorded for '" + p->name + "'");
          return r;
        }
      }
    }
    Subst tau = subst(p->sub);
    auto head = neutral(p->head);
    if (!head.reduced) {
      r.neutral = neu_force(head.neutral, std::move(tau), p->hi, p->lo);
      return r;
    }
    const TypePtr& h = head.type;
    if (h->tag == Type::Tag::Neutral) {
      r.neutral = neu_force(h->neutral, std::move(tau), p->hi, p->lo);
      return r;
    }
    if (h->tag != Type::Tag::Thunk)
      throw Error(codes::kSubst, "forced type is neither a thunk nor neutral");
    if (head.kind->tag != DfKind::Tag::CtxUp)
      throw Error(codes::kSubst, "thunk recorded with a non-contextual kind");
    const DfKind& kk = *head.kind;
    if (h->names.size() != tau.size() || kk.ctx.size() != tau.size())
      throw Error(codes::kSubst, "explicit substitution length does not match the thunk context");
    std::map<std::string, Entry> env;
    std::map<std::string, DfKindPtr> gamma;
    for (size_t i = 0; i < tau.size(); ++i) {
      Entry en;
      if (tau[i].sort == Sort::TermVar) {
        en.tag = Entry::Tag::Term;
        en.term = tau[i].term;
      } else {
        en.tag = Entry::Tag::Type;
        en.type = tau[i].type;
        en.kind = kk.ctx[i].kind ? kk.ctx[i].kind : tau[i].kind;
        gamma[h->names[i]] = en.kind;
      }
      env[h->names[i]] = std::move(en);
    }
    Substituter inner(std::move(env), std::move(gamma), watch_, depth_);
    r.reduced = true;
    r.type = inner.type(h->body);
    r.kind = kk.body;
    return r;
  }

  KindPtr kind(const KindPtr& k) {
    Depth d(*this);
    if (!k || k->tag == Kind::Tag::Type) return k;
    Scope sc(*this);
    std::set<std::string> scope_fv = fv(k);
    for (const auto& dd : k->ctx) scope_fv.insert(dd.name);
    Context ctx = context_in(k->ctx, sc, scope_fv);
    auto body = kind(k->body);
    return modify(k, [&](Kind& o) {
      o.ctx = std::move(ctx);
      o.body = body;
    });
  }

  Context context(const Context& ctx) {
    Scope sc(*this);
    std::set<std::string> scope_fv;
    for (const auto& d : ctx) {
      if (d.kind) fv_into(d.kind, scope_fv);
      if (d.type) fv_into(d.type, scope_fv);
      scope_fv.insert(d.name);
    }
    return context_in(ctx, sc, scope_fv);
  }

  Subst subst(const Subst& tau) {
    Subst out = tau;
    for (auto& e : out) {
      if (e.type) e.type = type(e.type);
      if (e.term) e.term = term(e.term);
    }
    return out;
  }

  TermPtr term(const TermPtr& e) {
    Depth d(*this);
    if (!e) return e;
    switch (e->tag) {
      case Term::Tag::Var: {
        auto it = env_.find(e->name);
        if (it == env_.end()) return e;
        switch (it->second.tag) {
          case Entry::Tag::Term: return it->second.term;
          case Entry::Tag::Rename: return modify(e, [&](Term& o) { o.name = it->second.rename; });
          case Entry::Tag::Type:
            throw Error(codes::kSubst, "term variable '" + e->name + "' is mapped to a type");
        }
        return e;
      }
      case Term::Tag::One:
      case Term::Tag::Def: return e;
      case Term::Tag::Susp: {
        auto ty = type(e->type);
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(e);
        for (const auto& n : e->names) scope_fv.insert(n);
        ErasedContext names;
        for (const auto& n : e->names) names.push_back(sc.enter(n, scope_fv));
        auto body = term(e->body);
        return modify(e, [&](Term& o) {
          o.names = names;
          o.body = body;
          o.type = ty;
        });
      }
      case Term::Tag::Force: {
        auto head = term(e->body);
        auto sub = subst(e->sub);
        return modify(e, [&](Term& o) {
          o.body = head;
          o.sub = std::move(sub);
        });
      }
      case Term::Tag::Store: {
        auto body = term(e->body);
        auto ty = type(e->type);
        return modify(e, [&](Term& o) {
          o.body = body;
          o.type = ty;
        });
      }
      case Term::Tag::Load: {
        auto bound = term(e->body);
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(e->cont);
        scope_fv.insert(e->name);
        auto x = sc.enter(e->name, scope_fv);
        auto cont = term(e->cont);
        return modify(e, [&](Term& o) {
          o.body = bound;
          o.name = x;
          o.cont = cont;
        });
      }
      case Term::Tag::TLam:
      case Term::Tag::Lam: {
        KindPtr k = e->tag == Term::Tag::TLam ? kind(e->kind) : nullptr;
        TypePtr ann = e->tag == Term::Tag::Lam ? type(e->type) : nullptr;
        Scope sc(*this);
        std::set<std::string> scope_fv = fv(e->body);
        scope_fv.insert(e->name);
        auto x = sc.enter(e->name, scope_fv);
        auto body = term(e->body);
        return modify(e, [&](Term& o) {
          if (o.tag == Term::Tag::TLam) o.kind = k;
          else o.type = ann;
          o.name = x;
          o.body = body;
        });
      }
      case Term::Tag::TApp:
      case Term::Tag::Annot: {
        auto head = term(e->body);
        auto ty = type(e->type);
        return modify(e, [&](Term& o) {
          o.body = head;
          o.type = ty;
        });
      }
      case Term::Tag::App: {
        auto head = term(e->body);
        auto arg = term(e->cont);
        return modify(e, [&](Term& o) {
          o.body = head;
          o.cont = arg;
        });
      }
      case Term::Tag::Ctor: {
        std::vector<TermPtr> args;
        for (const auto& a : e->args) args.push_back(term(a));
        auto ty = type(e->type);
        return modify(e, [&](Term& o) {
          o.args = std::move(args);
          o.type = ty;
        });
      }
      case Term::Tag::Match: {
        auto scrut = term(e->body);
        std::vector<Branch> branches;
        for (const auto& b : e->branches) {
          Scope sc(*this);
          std::set<std::string> scope_fv = fv(b.body);
          for (const auto& x : b.binders) scope_fv.insert(x);
          Branch nb;
          nb.ctor = b.ctor;
          for (const auto& x : b.binders) nb.binders.push_back(sc.enter(x, scope_fv));
          nb.body = term(b.body);
          branches.push_back(std::move(nb));
        }
        return modify(e, [&](Term& o) {
          o.body = scrut;
          o.branches = std::move(branches);
        });
      }
    }
    return e;
  }

 private:
  struct Depth {
    Substituter& s;
    explicit Depth(Substituter& sub) : s(sub) {
      ++s.depth_;
      if (s.watch_) {
        ++s.watch_->calls;
        if (s.depth_ > s.watch_->max_depth) s.watch_->max_depth = s.depth_;
        if (s.watch_->limit && s.depth_ > s.watch_->limit)
          throw Error(codes::kSubst, "substitution exceeded the recursion watchdog");
      }
    }
    ~Depth() { --s.depth_; }
  };

  // Records binder effects on the environment and undoes them on exit.
  class Scope {
   public:
    explicit Scope(Substituter& s) : s_(s) {}
    ~Scope() {
      for (auto it = saved_.rbegin(); it != saved_.rend(); ++it) {
        if (it->second) s_.env_[it->first] = *it->second;
        else s_.env_.erase(it->first);
      }
    }
    std::string enter(const std::string& b, const std::set<std::string>& scope_fv) {
      auto old = s_.env_.find(b);
      std::optional<Entry> prev;
      if (old != s_.env_.end()) prev = old->second;
      if (s_.range_.count(b)) {
        std::set<std::string> avoid = s_.range_;
        avoid.insert(scope_fv.begin(), scope_fv.end());
        for (const auto& [n, _] : s_.env_) avoid.insert(n);
        std::string fresh = fresh_name(b, avoid);
        saved_.emplace_back(b, prev);
        Entry en;
        en.tag = Entry::Tag::Rename;
        en.rename = fresh;
        s_.env_[b] = en;
        s_.range_.insert(fresh);
        return fresh;
      }
      if (prev) {
        saved_.emplace_back(b, prev);
        s_.env_.erase(b);
      }
      return b;
    }

   private:
    Substituter& s_;
    std::vector<std::pair<std::string, std::optional<Entry>>> saved_;
  };

  Context context_in(const Context& ctx, Scope& sc, const std::set<std::string>& scope_fv) {
    Context out;
    for (const auto& d : ctx) {
      Decl nd = d;
      if (d.kind) nd.kind = kind(d.kind);
      if (d.type) nd.type = type(d.type);
      nd.name = sc.enter(d.name, scope_fv);
      out.push_back(std::move(nd));
    }
    return out;
  }

  std::map<std::string, Entry> env_;
  std::map<std::string, DfKindPtr> gamma_;
  std::set<std::string> range_;
  SubstWatch* watch_ = nullptr;
  size_t depth_ = 0;
};

}  // namespace

TypePtr subst_type(const Subst& sigma, const DfContext& gamma, const TypePtr& t, SubstWatch* watch) {
  if (sigma.empty()) return t;
  return Substituter(sigma, gamma, watch).type(t);
}

NeutralResult subst_neutral(const Subst& sigma, const DfContext& gamma, const NeutralPtr& p, SubstWatch* watch) {
  return Substituter(sigma, gamma, watch).neutral(p);
}

TermPtr subst_term(const Subst& sigma, const DfContext& gamma, const TermPtr& e, SubstWatch* watch) {
  if (sigma.empty()) return e;
  return Substituter(sigma, gamma, watch).term(e);
}

KindPtr subst_kind(const Subst& sigma, const DfContext& gamma, const KindPtr& k, SubstWatch* watch) {
  if (sigma.empty()) return k;
  return Substituter(sigma, gamma, watch).kind(k);
}

Context subst_context(const Subst& sigma, const DfContext& gamma, const Context& ctx, SubstWatch* watch) {
  if (sigma.empty()) return ctx;
  return Substituter(sigma, gamma, watch).context(ctx);
}

Subst subst_subst(const Subst& sigma, const DfContext& gamma, const Subst& tau, SubstWatch* watch) {
  if (sigma.empty()) return tau;
  return Substituter(sigma, gamma, watch).subst(tau);
}

TypePtr single_subst_type(const std::string& a, const TypePtr& arg, const DfKindPtr& kind, const TypePtr& target) {
  return subst_type({sub_type(a, arg, kind)}, {{a, kind}}, target);
}

KindPtr single_subst_kind(const std::string& a, const TypePtr& arg, const DfKindPtr& kind, const KindPtr& target) {
  return subst_kind({sub_type(a, arg, kind)}, {{a, kind}}, target);
}

TermPtr single_subst_term(const std::string& x, const TermPtr& arg, const Mode& k, const TermPtr& target) {
  return subst_term({sub_term(x, arg, k)}, {{x, nullptr}}, target);
}

TermPtr single_subst_term_type(const std::string& a, const TypePtr& arg, const DfKindPtr& kind,
                               const TermPtr& target) {
  return subst_term({sub_type(a, arg, kind)}, {{a, kind}}, target);
}

}  // namespace elevator
