#include "elevator/mode_equiv.hpp"

#include <map>
#include <vector>

#include "elevator/typing.hpp"

namespace elevator {

namespace {

class Equiv {
 public:
  Equiv(const Mode& observer, const ModeSpec& spec) : n_(observer), spec_(spec) {}

  bool visible(const Mode& m) const { return !m.empty() && spec_.geq(m, n_); }

  bool context(const Context& a, const Context& b, std::vector<std::pair<std::string, std::string>>* bound) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      const auto& da = a[i];
      const auto& db = b[i];
      if (da.sort != db.sort) return false;
      if (da.sort == Sort::TypeVar) {
        if (!kind(da.kind, db.kind)) return false;
      } else if (!type(da.type, db.type)) {
        return false;
      }
      bind(da.name, db.name);
      if (bound) bound->push_back({da.name, db.name});
    }
    return true;
  }

  bool kind(const KindPtr& a, const KindPtr& b) {
    if (!a || !b) return a == b;
    if (a->tag != b->tag || a->hi != b->hi || a->lo != b->lo) return false;
    if (!visible(mode_of(a))) return true;
    if (a->tag == Kind::Tag::Type) return true;
    Scope s(*this);
    if (!context(a->ctx, b->ctx, &s.pairs)) return false;
    return kind(a->body, b->body);
  }

  bool type(const TypePtr& a, const TypePtr& b) {
    if (!a || !b) return a == b;
    if (a->tag != b->tag || a->mode != b->mode) return false;
    if (!visible(a->mode)) return true;
    switch (a->tag) {
      case Type::Tag::Unit: return true;
      case Type::Tag::Neutral: return neutral(a->neutral, b->neutral);
      case Type::Tag::Thunk: {
        if (a->names.size() != b->names.size()) return false;
        Scope s(*this);
        s.bind_all(a->names, b->names);
        return type(a->body, b->body);
      }
      case Type::Tag::CtxUp: {
        if (a->hi != b->hi || a->lo != b->lo) return false;
        Scope s(*this);
        if (!context(a->ctx, b->ctx, &s.pairs)) return false;
        return type(a->body, b->body);
      }
      case Type::Tag::Down:
        return a->hi == b->hi && a->lo == b->lo && type(a->body, b->body);
      case Type::Tag::Forall: {
        if (!kind(a->kind, b->kind)) return false;
        Scope s(*this);
        s.bind_one(a->var, b->var);
        return type(a->body, b->body);
      }
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

  bool neutral(const NeutralPtr& a, const NeutralPtr& b) {
    if (a->tag != b->tag) return false;
    if (a->tag == Neutral::Tag::Var) return var(a->name, b->name);
    return a->hi == b->hi && a->lo == b->lo && neutral(a->head, b->head) && subst(a->sub, b->sub);
  }

  bool subst(const Subst& a, const Subst& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      const auto& ea = a[i];
      const auto& eb = b[i];
      if (ea.sort != eb.sort || ea.mode != eb.mode) return false;
      if (ea.sort == Sort::TypeVar) {
        if (!type(ea.type, eb.type)) return false;
      } else if (!term(ea.term, eb.term, ea.mode)) {
        return false;
      }
    }
    return true;
  }

  bool term(const TermPtr& a, const TermPtr& b, const Mode& k) {
    if (!a || !b) return a == b;
    if (!visible(k)) return true;
    if (a->tag != b->tag) return false;
    switch (a->tag) {
      case Term::Tag::Var: return var(a->name, b->name);
      case Term::Tag::Def: return a->name == b->name;
      case Term::Tag::One: return a->hi == b->hi;
      case Term::Tag::Susp: {
        if (a->hi != b->hi || a->lo != b->lo || a->names.size() != b->names.size()) return false;
        Scope s(*this);
        s.bind_all(a->names, b->names);
        return term(a->body, b->body, a->lo);
      }
      case Term::Tag::Force:
        return a->hi == b->hi && a->lo == b->lo && term(a->body, b->body, a->hi) && subst(a->sub, b->sub);
      case Term::Tag::Store: return a->hi == b->hi && a->lo == b->lo && term(a->body, b->body, a->hi);
      case Term::Tag::Load: {
        if (a->hi != b->hi || a->lo != b->lo || !term(a->body, b->body, a->lo)) return false;
        Scope s(*this);
        s.bind_one(a->name, b->name);
        return term(a->cont, b->cont, k);
      }
      case Term::Tag::TLam: {
        if (!kind(a->kind, b->kind)) return false;
        Scope s(*this);
        s.bind_one(a->name, b->name);
        return term(a->body, b->body, k);
      }
      case Term::Tag::Lam: {
        if (!type(a->type, b->type)) return false;
        Scope s(*this);
        s.bind_one(a->name, b->name);
        return term(a->body, b->body, k);
      }
      case Term::Tag::TApp: return term(a->body, b->body, k) && type(a->type, b->type);
      case Term::Tag::App: return term(a->body, b->body, k) && term(a->cont, b->cont, k);
      case Term::Tag::Ctor:
        if (a->name != b->name || a->hi != b->hi || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (!term(a->args[i], b->args[i], k)) return false;
        return true;
      case Term::Tag::Match: {
        if (a->hi != b->hi || a->branches.size() != b->branches.size()) return false;
        if (!term(a->body, b->body, k)) return false;
        for (size_t i = 0; i < a->branches.size(); ++i) {
          const auto& ba = a->branches[i];
          const auto& bb = b->branches[i];
          if (ba.ctor != bb.ctor || ba.binders.size() != bb.binders.size()) return false;
          Scope s(*this);
          s.bind_all(ba.binders, bb.binders);
          if (!term(ba.body, bb.body, k)) return false;
        }
        return true;
      }
      case Term::Tag::Annot: return term(a->body, b->body, k) && type(a->type, b->type);
    }
    return false;
  }

 private:
  struct Scope {
    explicit Scope(Equiv& e) : eq(e) {}
    ~Scope() {
      for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) eq.unbind(it->first, it->second);
    }
    void bind_one(const std::string& a, const std::string& b) {
      eq.bind(a, b);
      pairs.push_back({a, b});
    }
    void bind_all(const std::vector<std::string>& as, const std::vector<std::string>& bs) {
      for (size_t i = 0; i < as.size(); ++i) bind_one(as[i], bs[i]);
    }
    Equiv& eq;
    std::vector<std::pair<std::string, std::string>> pairs;
  };

  void bind(const std::string& a, const std::string& b) {
    left_[a].push_back(next_);
    right_[b].push_back(next_);
    ++next_;
  }
  void unbind(const std::string& a, const std::string& b) {
    left_[a].pop_back();
    right_[b].pop_back();
  }
  bool var(const std::string& a, const std::string& b) const {
    auto la = left_.find(a);
    auto rb = right_.find(b);
    long ia = la == left_.end() || la->second.empty() ? -1 : la->second.back();
    long ib = rb == right_.end() || rb->second.empty() ? -1 : rb->second.back();
    if (ia < 0 && ib < 0) return a == b;
    return ia == ib;
  }

  Mode n_;
  const ModeSpec& spec_;
  std::map<std::string, std::vector<long>> left_, right_;
  long next_ = 0;
};

}  // namespace

bool equiv_context(const Context& a, const Context& b, const Mode& observer, const ModeSpec& spec) {
  return Equiv(observer, spec).context(a, b, nullptr);
}

bool equiv_kind(const KindPtr& a, const KindPtr& b, const Mode& observer, const ModeSpec& spec) {
  return Equiv(observer, spec).kind(a, b);
}

bool equiv_type(const TypePtr& a, const TypePtr& b, const Mode& observer, const ModeSpec& spec) {
  return Equiv(observer, spec).type(a, b);
}

bool equiv_term(const TermPtr& a, const TermPtr& b, const Mode& k, const Mode& observer, const ModeSpec& spec) {
  return Equiv(observer, spec).term(a, b, k);
}

bool equiv_subst(const Subst& a, const Subst& b, const Mode& observer, const ModeSpec& spec) {
  return Equiv(observer, spec).subst(a, b);
}

bool equiv_typed_term(const TypedTerm& a, const TypedTerm& b, const Mode& observer, const ModeSpec& spec,
                      const Signature& sig) {
  CheckOptions opts;
  opts.require_exhaustive_use = false;
  auto ca = wf_context(a.ctx, spec, sig);
  auto cb = wf_context(b.ctx, spec, sig);
  auto ea = check_term(ca, a.term, a.type, spec, sig, opts).term;
  auto eb = check_term(cb, b.term, b.type, spec, sig, opts).term;
  if (a.type->mode != b.type->mode) return false;
  Equiv eq(observer, spec);
  std::vector<std::pair<std::string, std::string>> bound;
  if (!eq.context(ca, cb, &bound)) return false;
  return eq.type(a.type, b.type) && eq.term(ea, eb, a.type->mode);
}

}  // namespace elevator
