#include "elevator/typing.hpp"

#include <algorithm>
#include <optional>

#include "elevator/printer.hpp"

namespace elevator {

const DataDecl* Signature::find_data(const std::string& name) const {
  for (const auto& d : datas)
    if (d.name == name) return &d;
  return nullptr;
}

const DefDecl* Signature::find_def(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

const DataDecl* Signature::find_ctor(const std::string& ctor, size_t* index) const {
  for (const auto& d : datas)
    for (size_t i = 0; i < d.ctors.size(); ++i)
      if (d.ctors[i].name == ctor) {
        if (index) *index = i;
        return &d;
      }
  return nullptr;
}

std::vector<TypePtr> ctor_arg_types(const DataDecl& data, size_t ctor, const Mode& m,
                                    const std::vector<TypePtr>& params) {
  auto it = data.instances.find(m);
  if (it == data.instances.end())
    throw Error(codes::kElab, "data type '" + data.name + "' is not well-formed at mode " + m);
  const auto& inst = it->second;
  if (params.size() != data.params.size())
    throw Error(codes::kArity, "data type '" + data.name + "' expects " + std::to_string(data.params.size()) +
                                   " parameters");
  const auto& args = inst.ctor_args.at(ctor);
  if (params.empty()) return args;
  Subst sigma;
  DfContext gamma;
  for (size_t i = 0; i < params.size(); ++i) {
    auto k = erase_kind(inst.param_kinds[i]);
    sigma.push_back(sub_type(data.params[i].first, params[i], k));
    gamma.push_back({data.params[i].first, k});
  }
  std::vector<TypePtr> out;
  for (const auto& a : args) out.push_back(subst_type(sigma, gamma, a));
  return out;
}

namespace {

std::string q(const std::string& s) { return "'" + s + "'"; }

struct Slot {
  Decl decl;
  bool visible = true;
  bool consumed = false;
};

struct Renamed {
  Context ctx;
  Subst ren;
  DfContext gamma;
};

class Checker {
 public:
  Checker(const ModeSpec& spec, const Signature& sig) : spec_(spec), sig_(sig) {}

  // Hides every entry whose mode is not above `j` for the guard's lifetime.
  class Vis {
   public:
    Vis(Checker& c, const Mode& j) : c_(c) {
      for (size_t i = 0; i < c_.ctx_.size(); ++i) {
        auto& s = c_.ctx_[i];
        if (s.visible && !c_.spec_.geq(s.decl.mode, j)) {
          s.visible = false;
          hidden_.push_back(i);
        }
      }
    }
    ~Vis() {
      for (size_t i : hidden_)
        if (i < c_.ctx_.size()) c_.ctx_[i].visible = true;
    }
    Vis(const Vis&) = delete;
    Vis& operator=(const Vis&) = delete;

   private:
    Checker& c_;
    std::vector<size_t> hidden_;
  };

  class TypeLevel {
   public:
    explicit TypeLevel(Checker& c) : c_(c), saved_(c.type_level_) { c_.type_level_ = true; }
    ~TypeLevel() { c_.type_level_ = saved_; }

   private:
    Checker& c_;
    bool saved_;
  };

  // ---- context management --------------------------------------------------

  void require_mode(const Mode& m) const {
    if (m.empty()) throw Error(codes::kElab, "missing mode annotation");
    if (!spec_.has(m)) throw Error(codes::kElab, "unknown mode " + q(m));
  }

  void push_raw(const Decl& d) { ctx_.push_back({d, true, false}); }

  void pop(size_t n, bool check_weakening) {
    for (size_t i = 0; i < n; ++i) {
      const Slot s = ctx_.back();
      ctx_.pop_back();
      if (check_weakening && !type_level_ && s.decl.sort == Sort::TermVar && !s.consumed &&
          !spec_.allows(s.decl.mode, StructRule::Weakening))
        throw Error(codes::kWeakening, "variable " + q(s.decl.name) + " at mode " + s.decl.mode +
                                           " is never used, but its mode does not allow weakening");
    }
  }

  long find(const std::string& name) const {
    for (size_t i = ctx_.size(); i-- > 0;)
      if (ctx_[i].decl.name == name) return static_cast<long>(i);
    return -1;
  }

  const Slot& lookup_visible(const std::string& name) const {
    long i = find(name);
    if (i < 0) throw Error(codes::kUnbound, "unbound variable " + q(name));
    const Slot& s = ctx_[static_cast<size_t>(i)];
    if (!s.visible)
      throw Error(codes::kModeAccess, "variable " + q(name) + " at mode " + s.decl.mode +
                                          " is not accessible here");
    return s;
  }

  void consume(const std::string& name) {
    if (type_level_) return;
    long i = find(name);
    Slot& s = ctx_[static_cast<size_t>(i)];
    if (s.consumed && !spec_.allows(s.decl.mode, StructRule::Contraction))
      throw Error(codes::kLinearity, "variable " + q(name) + " at mode " + s.decl.mode +
                                         " is used more than once, but its mode does not allow contraction");
    s.consumed = true;
  }

  // Every free variable of an elaborated subterm must live at a mode >= j.
  void require_fv_geq(const std::set<std::string>& names, const Mode& j, const char* what) const {
    for (const auto& n : names) {
      long i = find(n);
      if (i < 0) continue;
      const auto& d = ctx_[static_cast<size_t>(i)].decl;
      if (!spec_.geq(d.mode, j))
        throw Error(codes::kModeAccess, std::string(what) + " at mode " + j + " refers to " + q(n) +
                                            " at mode " + d.mode);
    }
  }

  std::vector<bool> snapshot() const {
    std::vector<bool> s;
    for (const auto& slot : ctx_) s.push_back(slot.consumed);
    return s;
  }

  void restore(const std::vector<bool>& s) {
    for (size_t i = 0; i < s.size() && i < ctx_.size(); ++i) ctx_[i].consumed = s[i];
  }

  // Elaborates each declaration in turn and pushes it. Returns the
  // elaborated declarations; the caller pops them.
  Context push_context(const Context& ctx) {
    Context out;
    try {
      for (const auto& d : ctx) {
        Decl nd = elab_decl(d);
        push_raw(nd);
        out.push_back(nd);
      }
    } catch (...) {
      pop(out.size(), false);
      throw;
    }
    return out;
  }

  Decl elab_decl(const Decl& d) {
    if (d.sort == Sort::TypeVar) {
      if (!d.kind) throw Error(codes::kElab, "declaration " + q(d.name) + " has no kind");
      require_mode(d.kind->hi);
      Vis v(*this, d.kind->hi);
      return decl_type(d.name, elab_kind(d.kind));
    }
    if (!d.type) throw Error(codes::kElab, "declaration " + q(d.name) + " has no type");
    auto [t, k] = synth_type(d.type);
    if (k->tag != Kind::Tag::Type)
      throw Error(codes::kKindMismatch, "the type of " + q(d.name) + " has kind " + print_kind(k));
    require_fv_geq(fv(t), k->hi, "declaration type");
    return decl_term(d.name, t);
  }

  void check_up_modes(const Mode& hi, const Mode& lo, const Context& ctx) const {
    for (const auto& d : ctx) {
      if (!spec_.gt(hi, d.mode))
        throw Error(codes::kModeAccess, "context entry " + q(d.name) + " at mode " + d.mode +
                                            " is not strictly below " + hi);
      if (!spec_.geq(d.mode, lo))
        throw Error(codes::kModeAccess, "context entry " + q(d.name) + " at mode " + d.mode +
                                            " is not above " + lo);
    }
    if (ctx.empty() && !spec_.geq(hi, lo))
      throw Error(codes::kModeAccess, "contextual up-shift requires " + hi + " >= " + lo);
  }

  // Renames the declarations of `ctx` positionally to `names`.
  Renamed rename_context(const Context& ctx, const ErasedContext& names) const {
    Renamed r;
    for (size_t i = 0; i < ctx.size(); ++i) {
      Decl nd = ctx[i];
      if (!r.ren.empty()) {
        if (nd.kind) nd.kind = subst_kind(r.ren, r.gamma, nd.kind);
        if (nd.type) nd.type = subst_type(r.ren, r.gamma, nd.type);
      }
      nd.name = names[i];
      const auto& d = ctx[i];
      if (names[i] != d.name) {
        if (d.sort == Sort::TypeVar) r.ren.push_back(sub_type(d.name, ty_var(names[i], d.mode), erase_kind(d.kind)));
        else r.ren.push_back(sub_term(d.name, tm_var(names[i]), d.mode));
      }
      r.gamma.push_back({d.name, d.sort == Sort::TypeVar ? erase_kind(d.kind) : nullptr});
      r.ctx.push_back(std::move(nd));
    }
    return r;
  }

  // ---- kinds and types -------------------------------------------------------

  KindPtr elab_kind(const KindPtr& k) {
    require_mode(k->hi);
    if (k->tag == Kind::Tag::Type) return kind_type(k->hi);
    require_mode(k->lo);
    Context ctx = push_context(k->ctx);
    KindPtr body;
    try {
      check_up_modes(k->hi, k->lo, ctx);
      Vis v(*this, k->lo);
      body = elab_kind(k->body);
      if (body->hi != k->lo)
        throw Error(codes::kKindMismatch, "body of " + print_kind(k) + " must live at mode " + k->lo);
    } catch (...) {
      pop(ctx.size(), false);
      throw;
    }
    pop(ctx.size(), false);
    return kind_up(k->hi, k->lo, std::move(ctx), body);
  }

  TypePtr check_type(const TypePtr& t, const KindPtr& k) {
    try {
      return check_type_(t, k);
    } catch (Error& err) {
      if (err.span().line == 0 && t->span.line) err.set_span(t->span);
      throw;
    }
  }

  TypePtr check_type_(const TypePtr& t, const KindPtr& k) {
    require_mode(k->hi);
    Vis v(*this, k->hi);
    if (t->tag == Type::Tag::Thunk) {
      if (k->tag != Kind::Tag::CtxUp)
        throw Error(codes::kKindMismatch, "type thunk checked against kind " + print_kind(k));
      if (t->names.size() != k->ctx.size())
        throw Error(codes::kArity, "type thunk binds " + std::to_string(t->names.size()) +
                                       " names but its kind declares " + std::to_string(k->ctx.size()));
      auto r = rename_context(k->ctx, t->names);
      KindPtr body_kind = r.ren.empty() ? k->body : subst_kind(r.ren, r.gamma, k->body);
      for (const auto& d : r.ctx) push_raw(d);
      TypePtr body;
      try {
        body = check_type(t->body, body_kind);
      } catch (...) {
        pop(r.ctx.size(), false);
        throw;
      }
      pop(r.ctx.size(), false);
      return ty_thunk(t->names, body, k->hi);
    }
    auto [nt, nk] = synth_type(t);
    if (!alpha_eq(nk, k))
      throw Error(codes::kKindMismatch, "type " + print_type(nt) + " has kind " + print_kind(nk) +
                                            " but " + print_kind(k) + " was expected");
    return nt;
  }

  std::pair<TypePtr, KindPtr> synth_type(const TypePtr& t) {
    try {
      return synth_type_(t);
    } catch (Error& err) {
      if (err.span().line == 0 && t->span.line) err.set_span(t->span);
      throw;
    }
  }

  std::pair<TypePtr, KindPtr> synth_type_(const TypePtr& t) {
    switch (t->tag) {
      case Type::Tag::Unit:
        require_mode(t->mode);
        return {ty_unit(t->mode), kind_type(t->mode)};
      case Type::Tag::Neutral: {
        auto [p, k] = synth_neutral(t->neutral);
        return {ty_neutral(p, k->hi), k};
      }
      case Type::Tag::Thunk:
        throw Error(codes::kCannotSynth, "cannot infer the kind of a type thunk; annotate it");
      case Type::Tag::CtxUp: {
        require_mode(t->hi);
        require_mode(t->lo);
        Context ctx = push_context(t->ctx);
        TypePtr body;
        try {
          check_up_modes(t->hi, t->lo, ctx);
          body = check_type(t->body, kind_type(t->lo));
        } catch (...) {
          pop(ctx.size(), false);
          throw;
        }
        pop(ctx.size(), false);
        return {ty_up(t->hi, t->lo, std::move(ctx), body), kind_type(t->hi)};
      }
      case Type::Tag::Down: {
        require_mode(t->hi);
        require_mode(t->lo);
        if (!spec_.geq(t->hi, t->lo))
          throw Error(codes::kModeAccess, "down-shift requires " + t->hi + " >= " + t->lo);
        auto body = check_type(t->body, kind_type(t->hi));
        return {ty_down(t->hi, t->lo, body), kind_type(t->lo)};
      }
      case Type::Tag::Forall: {
        if (!t->kind) throw Error(codes::kElab, "quantifier over " + q(t->var) + " has no kind");
        require_mode(t->kind->hi);
        KindPtr k;
        {
          Vis v(*this, t->kind->hi);
          k = elab_kind(t->kind);
        }
        push_raw(decl_type(t->var, k));
        TypePtr body;
        KindPtr bk;
        try {
          std::tie(body, bk) = synth_type(t->body);
          if (bk->tag != Kind::Tag::Type)
            throw Error(codes::kKindMismatch, "body of a quantifier must have kind Type");
          if (!spec_.geq(k->hi, bk->hi))
            throw Error(codes::kModeAccess, "quantifier over mode " + k->hi + " in a type at mode " + bk->hi +
                                                " requires " + k->hi + " >= " + bk->hi);
          require_fv_geq(fv(body), bk->hi, "quantified type");
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, false);
        return {ty_forall(t->var, k, body), kind_type(bk->hi)};
      }
      case Type::Tag::Arrow: {
        auto [dom, dk] = synth_type(t->body);
        if (dk->tag != Kind::Tag::Type)
          throw Error(codes::kKindMismatch, "function domain " + print_type(dom) + " has kind " + print_kind(dk));
        require_fv_geq(fv(dom), dk->hi, "function domain");
        auto cod = check_type(t->cod, dk);
        return {ty_arrow(dom, cod), dk};
      }
      case Type::Tag::Data: {
        const DataDecl* data = sig_.find_data(t->data_name);
        if (!data) throw Error(codes::kUnbound, "unknown data type " + q(t->data_name));
        require_mode(t->mode);
        auto inst = data->instances.find(t->mode);
        const std::vector<KindPtr>* kinds = nullptr;
        if (inst != data->instances.end()) kinds = &inst->second.param_kinds;
        else if (validating_ == data->name && validating_mode_ == t->mode && validating_kinds_)
          kinds = validating_kinds_;
        else throw Error(codes::kElab, "data type " + q(data->name) + " is not well-formed at mode " + t->mode);
        if (t->args.size() != data->params.size())
          throw Error(codes::kArity, "data type " + q(data->name) + " expects " +
                                         std::to_string(data->params.size()) + " parameters, got " +
                                         std::to_string(t->args.size()));
        std::vector<TypePtr> args;
        for (size_t i = 0; i < t->args.size(); ++i) {
          const auto& pk = (*kinds)[i];
          // Parameter kinds only mention the mode, never earlier parameters.
          args.push_back(check_type(t->args[i], pk));
        }
        return {ty_data(data->name, t->mode, std::move(args)), kind_type(t->mode)};
      }
      case Type::Tag::Redex: return synth_redex(t);
    }
    throw Error(codes::kElab, "unknown type form");
  }

  std::pair<TypePtr, KindPtr> synth_redex(const TypePtr& t) {
    const TypePtr& head = t->body;
    if (head->tag == Type::Tag::Thunk) {
      if (head->names.size() != t->sub.size())
        throw Error(codes::kArity, "type thunk binds " + std::to_string(head->names.size()) + " names but " +
                                       std::to_string(t->sub.size()) + " arguments were supplied");
      Context psi;
      Subst sigma;
      for (size_t i = 0; i < t->sub.size(); ++i) {
        const auto& arg = t->sub[i];
        const auto& name = head->names[i];
        bool done = false;
        if (arg.type && arg.sort != Sort::TermVar) {
          try {
            auto [a, k] = synth_type(arg.type);
            require_fv_geq(fv(a), k->hi, "type argument");
            psi.push_back(decl_type(name, k));
            sigma.push_back(sub_type(name, a, erase_kind(k)));
            done = true;
          } catch (const Error&) {
            if (arg.sort == Sort::TypeVar || !arg.term) throw;
          }
        }
        if (!done) {
          if (!arg.term) throw Error(codes::kElab, "argument " + std::to_string(i + 1) + " is not a term or type");
          TypeLevel tl(*this);
          auto [a, e] = synth("", arg.term);
          require_fv_geq(fv(e), a->mode, "term argument");
          psi.push_back(decl_term(name, a));
          sigma.push_back(sub_term(name, e, a->mode));
        }
      }
      for (const auto& d : psi) push_raw(d);
      TypePtr body;
      KindPtr bk;
      try {
        std::tie(body, bk) = synth_type(head->body);
      } catch (...) {
        pop(psi.size(), false);
        throw;
      }
      pop(psi.size(), false);
      auto gamma = erase_context(psi);
      return {subst_type(sigma, gamma, body), subst_kind(sigma, gamma, bk)};
    }
    auto [h, hk] = synth_type(head);
    if (hk->tag != Kind::Tag::CtxUp)
      throw Error(codes::kKindMismatch, "forced type " + print_type(h) + " has kind " + print_kind(hk));
    require_fv_geq(fv(h), hk->hi, "forced type");
    Subst sigma;
    {
      TypeLevel tl(*this);
      sigma = check_subst(t->sub, hk->ctx);
    }
    auto gamma = erase_context(hk->ctx);
    KindPtr rk = subst_kind(sigma, gamma, hk->body);
    // Reduce through a fresh placeholder so a thunk head is eliminated hereditarily.
    const std::string hole = "?head";
    auto dk = erase_kind(hk);
    auto shape = ty_neutral(neu_force(neu_var(hole), sigma, hk->hi, hk->lo), hk->lo);
    return {subst_type({sub_type(hole, h, dk)}, {{hole, dk}}, shape), rk};
  }

  std::pair<NeutralPtr, KindPtr> synth_neutral(const NeutralPtr& p) {
    if (p->tag == Neutral::Tag::Var) {
      long i = find(p->name);
      if (i < 0) {
        if (sig_.find_data(p->name))
          throw Error(codes::kElab, "data type " + q(p->name) + " needs a mode argument, as in " + p->name + "{m}");
        throw Error(codes::kUnbound, "unbound type variable " + q(p->name));
      }
      const Slot& s = lookup_visible(p->name);
      if (s.decl.sort != Sort::TypeVar)
        throw Error(codes::kKindMismatch, "term variable " + q(p->name) + " used as a type");
      return {neu_var(p->name), s.decl.kind};
    }
    auto [h, hk] = synth_neutral(p->head);
    if (hk->tag != Kind::Tag::CtxUp)
      throw Error(codes::kKindMismatch, "forced type has kind " + print_kind(hk));
    if ((!p->hi.empty() && p->hi != hk->hi) || (!p->lo.empty() && p->lo != hk->lo))
      throw Error(codes::kKindMismatch, "force annotated at modes " + p->hi + "," + p->lo + " but the head has kind " +
                                            print_kind(hk));
    require_fv_geq(fv(h), hk->hi, "forced type");
    Subst sigma;
    {
      TypeLevel tl(*this);
      sigma = check_subst(p->sub, hk->ctx);
    }
    KindPtr rk = subst_kind(sigma, erase_context(hk->ctx), hk->body);
    return {neu_force(h, sigma, hk->hi, hk->lo), rk};
  }

  // ---- substitutions -----------------------------------------------------------

  Subst check_subst(const Subst& sigma, const Context& psi) {
    if (sigma.size() != psi.size())
      throw Error(codes::kDomainMismatch, "substitution has " + std::to_string(sigma.size()) +
                                              " entries but the context has " + std::to_string(psi.size()));
    Subst out;
    DfContext gamma;
    for (size_t i = 0; i < psi.size(); ++i) {
      const auto& d = psi[i];
      const auto& s = sigma[i];
      if (d.sort == Sort::TypeVar) {
        if (s.sort == Sort::TermVar || !s.type)
          throw Error(codes::kDomainMismatch, "entry " + std::to_string(i + 1) + " must be a type for " + q(d.name));
        KindPtr k = out.empty() ? d.kind : subst_kind(out, gamma, d.kind);
        TypePtr a;
        {
          TypeLevel tl(*this);
          a = check_type(s.type, k);
        }
        auto dk = erase_kind(d.kind);
        out.push_back(sub_type(d.name, a, dk));
        gamma.push_back({d.name, dk});
      } else {
        if (s.sort == Sort::TypeVar || !s.term)
          throw Error(codes::kDomainMismatch, "entry " + std::to_string(i + 1) + " must be a term for " + q(d.name));
        if (!s.mode.empty() && s.mode != d.mode)
          throw Error(codes::kDomainMismatch, "entry " + std::to_string(i + 1) + " is tagged with mode " + s.mode +
                                                  " but " + q(d.name) + " lives at " + d.mode);
        TypePtr a = out.empty() ? d.type : subst_type(out, gamma, d.type);
        TermPtr e = check(s.term, a);
        out.push_back(sub_term(d.name, e, d.mode));
        gamma.push_back({d.name, nullptr});
      }
    }
    return out;
  }

  // ---- terms ---------------------------------------------------------------------

  TermPtr check(const TermPtr& e, const TypePtr& a) {
    try {
      return check_(e, a);
    } catch (Error& err) {
      if (err.span().line == 0 && e->span.line) err.set_span(e->span);
      throw;
    }
  }

  std::pair<TypePtr, TermPtr> synth(const Mode& k, const TermPtr& e) {
    try {
      return synth_(k, e);
    } catch (Error& err) {
      if (err.span().line == 0 && e->span.line) err.set_span(e->span);
      throw;
    }
  }

  [[noreturn]] void mismatch(const TermPtr& e, const TypePtr& expected, const std::string& what) const {
    (void)e;
    throw Error(codes::kTypeMismatch, what + " cannot have type " + print_type(expected));
  }

  void check_modes(const Term& e, const Mode& hi, const Mode& lo) const {
    if ((!e.hi.empty() && e.hi != hi) || (!e.lo.empty() && e.lo != lo))
      throw Error(codes::kTypeMismatch, "term annotated with modes " + e.hi + "," + e.lo + " but expected " + hi +
                                            "," + lo);
  }

  TermPtr check_(const TermPtr& e, const TypePtr& a) {
    const Mode& k = a->mode;
    require_mode(k);
    Vis v(*this, k);
    switch (e->tag) {
      case Term::Tag::Lam: {
        if (a->tag != Type::Tag::Arrow) mismatch(e, a, "a function");
        if (e->type) {
          auto ann = check_type(e->type, kind_type(k));
          if (!alpha_eq(ann, a->body))
            throw Error(codes::kTypeMismatch, "annotation " + print_type(ann) + " does not match domain " +
                                                  print_type(a->body));
        }
        push_raw(decl_term(e->name, a->body));
        TermPtr body;
        try {
          body = check(e->body, a->cod);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return tm_lam(e->name, a->body, body);
      }
      case Term::Tag::TLam: {
        if (a->tag != Type::Tag::Forall) mismatch(e, a, "a type abstraction");
        if (e->kind) {
          KindPtr ann;
          {
            require_mode(e->kind->hi);
            Vis kv(*this, e->kind->hi);
            ann = elab_kind(e->kind);
          }
          if (!alpha_eq(ann, a->kind))
            throw Error(codes::kKindMismatch, "annotation " + print_kind(ann) + " does not match " +
                                                  print_kind(a->kind));
        }
        TypePtr body_type = a->body;
        if (e->name != a->var) {
          auto free = fv(a->body);
          if (free.count(e->name))
            throw Error(codes::kElab, "type binder " + q(e->name) + " would capture a variable of its type");
          body_type = single_subst_type(a->var, ty_var(e->name, a->kind->hi), erase_kind(a->kind), a->body);
        }
        push_raw(decl_type(e->name, a->kind));
        TermPtr body;
        try {
          body = check(e->body, body_type);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return tm_tlam(e->name, a->kind, body);
      }
      case Term::Tag::One:
        if (a->tag != Type::Tag::Unit) mismatch(e, a, "unit");
        if (!e->hi.empty() && e->hi != k)
          throw Error(codes::kTypeMismatch, "unit@" + e->hi + " cannot have type " + print_type(a));
        return tm_one(k);
      case Term::Tag::Susp: {
        if (a->tag != Type::Tag::CtxUp) mismatch(e, a, "a suspension");
        check_modes(*e, a->hi, a->lo);
        if (e->names.size() != a->ctx.size())
          throw Error(codes::kArity, "suspension binds " + std::to_string(e->names.size()) +
                                         " names but its type declares " + std::to_string(a->ctx.size()));
        auto r = rename_context(a->ctx, e->names);
        TypePtr body_type = r.ren.empty() ? a->body : subst_type(r.ren, r.gamma, a->body);
        for (const auto& d : r.ctx) push_raw(d);
        TermPtr body;
        try {
          body = check(e->body, body_type);
        } catch (...) {
          pop(r.ctx.size(), false);
          throw;
        }
        pop(r.ctx.size(), true);
        return recorded(tm_susp(a->hi, a->lo, e->names, body), a);
      }
      case Term::Tag::Store: {
        if (a->tag != Type::Tag::Down) mismatch(e, a, "a store");
        check_modes(*e, a->hi, a->lo);
        auto body = check(e->body, a->body);
        return recorded(tm_store(a->hi, a->lo, body), a);
      }
      case Term::Tag::Ctor: {
        if (a->tag != Type::Tag::Data) mismatch(e, a, "constructor " + q(e->name));
        size_t idx = 0;
        const DataDecl* data = sig_.find_ctor(e->name, &idx);
        if (!data) throw Error(codes::kUnbound, "unknown constructor " + q(e->name));
        if (data->name != a->data_name)
          throw Error(codes::kTypeMismatch, "constructor " + q(e->name) + " of " + data->name +
                                                " cannot have type " + print_type(a));
        if (!e->hi.empty() && e->hi != a->mode)
          throw Error(codes::kTypeMismatch, "constructor " + e->name + "{" + e->hi + "} cannot have type " +
                                                print_type(a));
        auto arg_types = ctor_arg_types(*data, idx, a->mode, a->args);
        if (arg_types.size() != e->args.size())
          throw Error(codes::kArity, "constructor " + q(e->name) + " expects " + std::to_string(arg_types.size()) +
                                         " arguments, got " + std::to_string(e->args.size()));
        std::vector<TermPtr> args;
        for (size_t i = 0; i < arg_types.size(); ++i) args.push_back(check(e->args[i], arg_types[i]));
        return recorded(tm_ctor(data->name, a->mode, e->name, std::move(args)), a);
      }
      case Term::Tag::Load: {
        auto [bt, bound] = synth(k, e->body);
        if (bt->tag != Type::Tag::Down)
          throw Error(codes::kTypeMismatch, "load expects a stored value, got type " + print_type(bt));
        check_modes(*e, bt->hi, bt->lo);
        if (!spec_.geq(bt->lo, k))
          throw Error(codes::kModeAccess, "load of a value stored at mode " + bt->lo + " from mode " + k);
        require_fv_geq(fv(bound), bt->lo, "loaded term");
        push_raw(decl_term(e->name, bt->body));
        TermPtr cont;
        try {
          cont = check(e->cont, a);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return tm_load(bt->hi, bt->lo, e->name, bound, cont);
      }
      case Term::Tag::Match: {
        auto [st, scrut] = synth(k, e->body);
        if (st->tag != Type::Tag::Data)
          throw Error(codes::kTypeMismatch, "match expects a data value, got type " + print_type(st));
        if (st->mode != k)
          throw Error(codes::kModeAccess, "matching on a value at mode " + st->mode + " from mode " + k);
        if (!e->hi.empty() && e->hi != k)
          throw Error(codes::kTypeMismatch, "match annotated at mode " + e->hi + " but checked at " + k);
        auto branches = check_branches(*e, st, a);
        return tm_match(k, scrut, std::move(branches));
      }
      default: {
        auto [t, out] = synth(k, e);
        if (!alpha_eq(t, a))
          throw Error(codes::kTypeMismatch, "expected type " + print_type(a) + " but found " + print_type(t) +
                                                (t->mode != a->mode ? " (mode " + t->mode + ")" : ""));
        return out;
      }
    }
  }

  // Checks each branch from the same usage state; `expected` may be null, in
  // which case the first branch fixes it.
  std::vector<Branch> check_branches(const Term& e, const TypePtr& scrut_type, TypePtr& expected_ref) {
    const DataDecl* data = sig_.find_data(scrut_type->data_name);
    if (!data) throw Error(codes::kUnbound, "unknown data type " + q(scrut_type->data_name));
    std::set<std::string> seen;
    for (const auto& b : e.branches) {
      size_t idx = 0;
      const DataDecl* owner = sig_.find_ctor(b.ctor, &idx);
      if (!owner || owner != data)
        throw Error(codes::kTypeMismatch, "pattern " + q(b.ctor) + " is not a constructor of " + data->name);
      if (!seen.insert(b.ctor).second) throw Error(codes::kElab, "duplicate branch for " + q(b.ctor));
    }
    for (const auto& c : data->ctors)
      if (!seen.count(c.name)) throw Error(codes::kNonExhaustive, "match is missing a branch for " + q(c.name));

    const auto start = snapshot();
    std::vector<std::vector<bool>> outcomes;
    std::vector<Branch> out;
    for (const auto& b : e.branches) {
      restore(start);
      size_t idx = 0;
      sig_.find_ctor(b.ctor, &idx);
      auto arg_types = ctor_arg_types(*data, idx, scrut_type->mode, scrut_type->args);
      if (arg_types.size() != b.binders.size())
        throw Error(codes::kArity, "pattern " + q(b.ctor) + " binds " + std::to_string(b.binders.size()) +
                                       " variables but the constructor has " + std::to_string(arg_types.size()) +
                                       " arguments");
      for (size_t i = 0; i < arg_types.size(); ++i) push_raw(decl_term(b.binders[i], arg_types[i]));
      TermPtr body;
      try {
        if (expected_ref) {
          body = check(b.body, expected_ref);
        } else {
          auto [t, bo] = synth(scrut_type->mode, b.body);
          if (t->mode != scrut_type->mode)
            throw Error(codes::kTypeMismatch, "branch result at mode " + t->mode + " in a match at mode " +
                                                  scrut_type->mode);
          expected_ref = t;
          body = bo;
        }
      } catch (...) {
        pop(arg_types.size(), false);
        throw;
      }
      pop(arg_types.size(), true);
      out.push_back({b.ctor, b.binders, body});
      outcomes.push_back(snapshot());
    }
    if (outcomes.empty()) return out;
    std::vector<bool> merged(start.size(), false);
    for (size_t i = 0; i < start.size(); ++i) {
      bool any = false, all = true;
      for (const auto& o : outcomes) {
        any = any || o[i];
        all = all && o[i];
      }
      const auto& d = ctx_[i].decl;
      if (any != all && d.sort == Sort::TermVar && !type_level_) {
        if (!spec_.allows(d.mode, StructRule::Weakening))
          throw Error(codes::kWeakening, "variable " + q(d.name) + " at mode " + d.mode +
                                             " is used in some branches but not others, and its mode does not allow "
                                             "weakening");
        if (!spec_.allows(d.mode, StructRule::Contraction))
          throw Error(codes::kLinearity, "variable " + q(d.name) + " at mode " + d.mode +
                                             " must be used consistently across branches since its mode does not "
                                             "allow contraction");
      }
      merged[i] = any;
    }
    restore(merged);
    return out;
  }

  std::vector<Branch> check_branches(const Term& e, const TypePtr& scrut_type, const TypePtr& expected) {
    TypePtr copy = expected;
    return check_branches(e, scrut_type, copy);
  }

  TypePtr def_type(const std::string& name) const {
    if (name == self_name_) {
      if (!self_allowed_)
        throw Error(codes::kRecursion, "definition " + q(name) +
                                           " refers to itself, but recursion is not allowed at mode " +
                                           (self_type_ ? self_type_->mode : std::string("?")));
      return self_type_;
    }
    if (const DefDecl* d = sig_.find_def(name)) return d->type;
    return nullptr;
  }

  // Elaborated suspensions, stores and constructors keep their checked type
  // so that reducts placed in synthesis position still synthesize.
  static TermPtr recorded(TermPtr e, const TypePtr& a) {
    return modify(e, [&](Term& t) { t.type = a; });
  }

  std::pair<TypePtr, TermPtr> synth_recorded(const TermPtr& e) {
    auto [t, kk] = synth_type(e->type);
    if (kk->tag != Kind::Tag::Type)
      throw Error(codes::kKindMismatch, "recorded type " + print_type(t) + " is not a type of terms");
    require_fv_geq(fv(t), kk->hi, "recorded type");
    return {t, check(e, t)};
  }

  std::pair<TypePtr, TermPtr> synth_(const Mode& k, const TermPtr& e) {
    std::optional<Vis> v;
    if (!k.empty()) {
      require_mode(k);
      v.emplace(*this, k);
    }
    switch (e->tag) {
      case Term::Tag::Var: {
        if (find(e->name) >= 0) {
          const Slot& s = lookup_visible(e->name);
          if (s.decl.sort != Sort::TermVar)
            throw Error(codes::kElab, "type variable " + q(e->name) + " used as a term");
          TypePtr t = s.decl.type;
          consume(e->name);
          return {t, tm_var(e->name)};
        }
        if (auto t = def_type(e->name)) return {t, tm_def(e->name)};
        if (sig_.find_ctor(e->name)) return synth_(k, tm_ctor("", "", e->name, {}));
        throw Error(codes::kUnbound, "unbound variable " + q(e->name));
      }
      case Term::Tag::Def: {
        if (auto t = def_type(e->name)) return {t, e};
        throw Error(codes::kUnbound, "unknown definition " + q(e->name));
      }
      case Term::Tag::One:
        if (e->hi.empty()) throw Error(codes::kCannotSynth, "cannot infer the mode of unit; write unit@m");
        require_mode(e->hi);
        return {ty_unit(e->hi), tm_one(e->hi)};
      case Term::Tag::Force: {
        auto [ht, head] = synth(k, e->body);
        if (ht->tag != Type::Tag::CtxUp)
          throw Error(codes::kTypeMismatch, "force expects a suspension, got type " + print_type(ht));
        check_modes(*e, ht->hi, ht->lo);
        require_fv_geq(fv(head), ht->hi, "forced term");
        Subst sigma = check_subst(e->sub, ht->ctx);
        TypePtr result = subst_type(sigma, erase_context(ht->ctx), ht->body);
        return {result, tm_force(ht->hi, ht->lo, head, sigma)};
      }
      case Term::Tag::TApp: {
        auto [ht, head] = synth(k, e->body);
        if (ht->tag != Type::Tag::Forall)
          throw Error(codes::kTypeMismatch, "type application to a term of type " + print_type(ht));
        TypePtr arg;
        {
          TypeLevel tl(*this);
          arg = check_type(e->type, ht->kind);
        }
        TypePtr result = single_subst_type(ht->var, arg, erase_kind(ht->kind), ht->body);
        return {result, tm_tapp(head, arg)};
      }
      case Term::Tag::App: {
        auto [ht, head] = synth(k, e->body);
        if (ht->tag != Type::Tag::Arrow)
          throw Error(codes::kTypeMismatch, "application of a term of type " + print_type(ht));
        auto arg = check(e->cont, ht->body);
        return {ht->cod, tm_app(head, arg)};
      }
      case Term::Tag::Load: {
        auto [bt, bound] = synth(k, e->body);
        if (bt->tag != Type::Tag::Down)
          throw Error(codes::kTypeMismatch, "load expects a stored value, got type " + print_type(bt));
        check_modes(*e, bt->hi, bt->lo);
        if (!k.empty() && !spec_.geq(bt->lo, k))
          throw Error(codes::kModeAccess, "load of a value stored at mode " + bt->lo + " from mode " + k);
        require_fv_geq(fv(bound), bt->lo, "loaded term");
        push_raw(decl_term(e->name, bt->body));
        TypePtr t;
        TermPtr cont;
        try {
          std::tie(t, cont) = synth(k.empty() ? bt->lo : k, e->cont);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return {t, tm_load(bt->hi, bt->lo, e->name, bound, cont)};
      }
      case Term::Tag::Match: {
        auto [st, scrut] = synth(k, e->body);
        if (st->tag != Type::Tag::Data)
          throw Error(codes::kTypeMismatch, "match expects a data value, got type " + print_type(st));
        Vis mv(*this, st->mode);
        TypePtr expected;
        auto branches = check_branches(*e, st, expected);
        if (!expected) throw Error(codes::kCannotSynth, "cannot infer the type of an empty match");
        return {expected, tm_match(st->mode, scrut, std::move(branches))};
      }
      case Term::Tag::Ctor: {
        if (e->type) return synth_recorded(e);
        size_t idx = 0;
        const DataDecl* data = sig_.find_ctor(e->name, &idx);
        if (!data) throw Error(codes::kUnbound, "unknown constructor " + q(e->name));
        if (!data->params.empty() || e->hi.empty())
          throw Error(codes::kCannotSynth, "cannot infer the type of constructor " + q(e->name) + "; annotate it");
        require_mode(e->hi);
        auto t = ty_data(data->name, e->hi, {});
        return {t, check(e, t)};
      }
      case Term::Tag::Annot: {
        auto [t, kk] = synth_type(e->type);
        if (kk->tag != Kind::Tag::Type)
          throw Error(codes::kKindMismatch, "annotation " + print_type(t) + " is not a type of terms");
        require_fv_geq(fv(t), kk->hi, "annotation");
        return {t, check(e->body, t)};
      }
      case Term::Tag::Lam: {
        if (!e->type) throw Error(codes::kCannotSynth, "cannot infer the type of an unannotated lambda");
        auto [dom, dk] = synth_type(e->type);
        if (dk->tag != Kind::Tag::Type) throw Error(codes::kKindMismatch, "lambda annotation is not a type");
        require_fv_geq(fv(dom), dk->hi, "lambda annotation");
        Vis lv(*this, dk->hi);
        push_raw(decl_term(e->name, dom));
        TypePtr cod;
        TermPtr body;
        try {
          std::tie(cod, body) = synth(dk->hi, e->body);
          if (cod->mode != dk->hi)
            throw Error(codes::kTypeMismatch, "function body at mode " + cod->mode + " for a domain at mode " + dk->hi);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return {ty_arrow(dom, cod), tm_lam(e->name, dom, body)};
      }
      case Term::Tag::TLam: {
        if (!e->kind) throw Error(codes::kCannotSynth, "cannot infer the kind of an unannotated type abstraction");
        KindPtr kd;
        {
          require_mode(e->kind->hi);
          Vis kv(*this, e->kind->hi);
          kd = elab_kind(e->kind);
        }
        push_raw(decl_type(e->name, kd));
        TypePtr bt;
        TermPtr body;
        try {
          std::tie(bt, body) = synth(k, e->body);
          if (!spec_.geq(kd->hi, bt->mode))
            throw Error(codes::kModeAccess, "type abstraction over mode " + kd->hi + " in a term at mode " + bt->mode);
        } catch (...) {
          pop(1, false);
          throw;
        }
        pop(1, true);
        return {ty_forall(e->name, kd, bt), tm_tlam(e->name, kd, body)};
      }
      case Term::Tag::Susp:
        if (e->type) return synth_recorded(e);
        throw Error(codes::kCannotSynth, "cannot infer the type of a suspension; annotate it");
      case Term::Tag::Store:
        if (e->type) return synth_recorded(e);
        throw Error(codes::kCannotSynth, "cannot infer the type of a store; annotate it");
    }
    throw Error(codes::kElab, "unknown term form");
  }

  // ---- signatures -----------------------------------------------------------------

  void validate_data(DataDecl& data) {
    std::optional<Error> first;
    for (const auto& m : spec_.modes()) {
      auto inst_mode = [&](const Mode& x) { return x == kDataModeParam ? m : x; };
      DataDecl::Instance inst;
      try {
        Context params;
        for (const auto& [name, k] : data.params) {
          auto mk = map_modes(k, inst_mode);
          require_mode(mk->hi);
          KindPtr ek;
          {
            Vis v(*this, mk->hi);
            ek = elab_kind(mk);
          }
          inst.param_kinds.push_back(ek);
          params.push_back(decl_type(name, ek));
        }
        for (const auto& d : params) push_raw(d);
        validating_ = data.name;
        validating_mode_ = m;
        validating_kinds_ = &inst.param_kinds;
        try {
          for (const auto& c : data.ctors) {
            std::vector<TypePtr> args;
            for (const auto& a : c.args) args.push_back(check_type(map_modes(a, inst_mode), kind_type(m)));
            inst.ctor_args.push_back(std::move(args));
          }
        } catch (...) {
          validating_.clear();
          validating_kinds_ = nullptr;
          pop(params.size(), false);
          throw;
        }
        validating_.clear();
        validating_kinds_ = nullptr;
        pop(params.size(), false);
        data.instances[m] = std::move(inst);
      } catch (const Error& err) {
        if (!first) first = err;
      }
    }
    if (data.instances.empty() && first)
      throw Error(first->code(), "data " + q(data.name) + ": " + first->what(), first->span());
  }

  const ModeSpec& spec_;
  const Signature& sig_;
  std::vector<Slot> ctx_;
  bool type_level_ = false;
  std::string self_name_;
  TypePtr self_type_;
  bool self_allowed_ = false;
  std::string validating_;
  Mode validating_mode_;
  const std::vector<KindPtr>* validating_kinds_ = nullptr;
};

UsageMask usage_of(const Checker& c, size_t n) {
  auto s = c.snapshot();
  s.resize(n);
  return s;
}

void check_exhaustive(const Context& ctx, const UsageMask& usage, const ModeSpec& spec) {
  for (size_t i = 0; i < ctx.size(); ++i) {
    const auto& d = ctx[i];
    if (d.sort == Sort::TermVar && !usage[i] && !spec.allows(d.mode, StructRule::Weakening))
      throw Error(codes::kWeakening, "variable '" + d.name + "' at mode " + d.mode +
                                         " is never used, but its mode does not allow weakening");
  }
}

}  // namespace

Context wf_context(const Context& ctx, const ModeSpec& spec, const Signature& sig) {
  Checker c(spec, sig);
  return c.push_context(ctx);
}

KindPtr wf_kind(const Context& ctx, const KindPtr& k, const ModeSpec& spec, const Signature& sig) {
  Checker c(spec, sig);
  c.push_context(ctx);
  c.require_mode(k->hi);
  Checker::Vis v(c, k->hi);
  return c.elab_kind(k);
}

TypePtr check_type(const Context& ctx, const TypePtr& t, const KindPtr& k, const ModeSpec& spec,
                   const Signature& sig) {
  Checker c(spec, sig);
  c.push_context(ctx);
  KindPtr ek;
  {
    c.require_mode(k->hi);
    Checker::Vis v(c, k->hi);
    ek = c.elab_kind(k);
  }
  return c.check_type(t, ek);
}

std::pair<TypePtr, KindPtr> synth_type(const Context& ctx, const TypePtr& t, const ModeSpec& spec,
                                       const Signature& sig) {
  Checker c(spec, sig);
  c.push_context(ctx);
  auto r = c.synth_type(t);
  c.require_fv_geq(fv(r.first), r.second->hi, "type");
  return r;
}

KindPtr synth_neutral_type(const Context& ctx, const NeutralPtr& p, const ModeSpec& spec, const Signature& sig) {
  Checker c(spec, sig);
  c.push_context(ctx);
  return c.synth_neutral(p).second;
}

CheckResult check_term(const Context& ctx, const TermPtr& e, const TypePtr& t, const ModeSpec& spec,
                       const Signature& sig, const CheckOptions& opts) {
  Checker c(spec, sig);
  Context ectx = c.push_context(ctx);
  auto [et, kk] = c.synth_type(t);
  if (kk->tag != Kind::Tag::Type) throw Error(codes::kKindMismatch, "expected a type of terms");
  CheckResult r;
  r.term = c.check(e, et);
  r.usage = usage_of(c, ectx.size());
  if (opts.require_exhaustive_use) check_exhaustive(ectx, r.usage, spec);
  return r;
}

SynthResult synth_term(const Context& ctx, const TermPtr& e, const Mode& k, const ModeSpec& spec,
                       const Signature& sig, const CheckOptions& opts) {
  Checker c(spec, sig);
  Context ectx = c.push_context(ctx);
  SynthResult r;
  std::tie(r.type, r.term) = c.synth(k, e);
  r.usage = usage_of(c, ectx.size());
  if (opts.require_exhaustive_use) check_exhaustive(ectx, r.usage, spec);
  return r;
}

SubstResult check_subst(const Context& ctx, const Subst& sigma, const Context& target, const ModeSpec& spec,
                        const Signature& sig, const CheckOptions& opts) {
  Checker c(spec, sig);
  Context ectx = c.push_context(ctx);
  Context etarget = c.push_context(target);
  c.pop(etarget.size(), false);
  SubstResult r;
  r.subst = c.check_subst(sigma, etarget);
  r.usage = usage_of(c, ectx.size());
  if (opts.require_exhaustive_use) check_exhaustive(ectx, r.usage, spec);
  return r;
}

Signature check_signature(const Signature& sig, const ModeSpec& spec) {
  Signature out;
  Checker c(spec, out);
  std::set<std::string> names;
  for (const auto& data : sig.datas) {
    if (!names.insert(data.name).second)
      throw Error(codes::kElab, "duplicate declaration of " + q(data.name), data.span);
    for (const auto& ctor : data.ctors)
      if (!names.insert(ctor.name).second)
        throw Error(codes::kElab, "duplicate declaration of " + q(ctor.name), data.span);
    DataDecl d = data;
    d.instances.clear();
    out.datas.push_back(d);
    try {
      c.validate_data(out.datas.back());
    } catch (Error& err) {
      if (err.span().line == 0) err.set_span(data.span);
      throw;
    }
  }
  for (const auto& def : sig.defs) {
    if (!names.insert(def.name).second)
      throw Error(codes::kElab, "duplicate declaration of " + q(def.name), def.span);
    try {
      auto [t, k] = c.synth_type(def.type);
      if (k->tag != Kind::Tag::Type)
        throw Error(codes::kKindMismatch, "declared type " + print_type(t) + " is not a type of terms");
      c.self_name_ = def.name;
      c.self_type_ = t;
      c.self_allowed_ = spec.recursion(t->mode) == RecursionPolicy::General;
      auto body = c.check(def.body, t);
      c.self_name_.clear();
      c.self_type_.reset();
      out.defs.push_back({def.name, t, body, def.span});
    } catch (Error& err) {
      c.self_name_.clear();
      c.self_type_.reset();
      throw Error(err.code(), "in definition " + q(def.name) + ": " + err.what(),
                  err.span().line ? err.span() : def.span);
    }
  }
  return out;
}

size_t count_occurrences(const TermPtr& e, const std::string& x) {
  if (!e) return 0;
  switch (e->tag) {
    case Term::Tag::Var: return e->name == x ? 1 : 0;
    case Term::Tag::One:
    case Term::Tag::Def: return 0;
    case Term::Tag::Susp:
      if (std::find(e->names.begin(), e->names.end(), x) != e->names.end()) return 0;
      return count_occurrences(e->body, x);
    case Term::Tag::Force: {
      size_t n = count_occurrences(e->body, x);
      for (const auto& s : e->sub)
        if (s.term) n += count_occurrences(s.term, x);
      return n;
    }
    case Term::Tag::Store:
    case Term::Tag::TApp:
    case Term::Tag::Annot: return count_occurrences(e->body, x);
    case Term::Tag::Load:
      return count_occurrences(e->body, x) + (e->name == x ? 0 : count_occurrences(e->cont, x));
    case Term::Tag::TLam:
    case Term::Tag::Lam: return e->name == x ? 0 : count_occurrences(e->body, x);
    case Term::Tag::App: return count_occurrences(e->body, x) + count_occurrences(e->cont, x);
    case Term::Tag::Ctor: {
      size_t n = 0;
      for (const auto& a : e->args) n += count_occurrences(a, x);
      return n;
    }
    case Term::Tag::Match: {
      size_t best = 0;
      for (const auto& b : e->branches) {
        if (std::find(b.binders.begin(), b.binders.end(), x) != b.binders.end()) continue;
        best = std::max(best, count_occurrences(b.body, x));
      }
      return count_occurrences(e->body, x) + best;
    }
  }
  return 0;
}

}  // namespace elevator
