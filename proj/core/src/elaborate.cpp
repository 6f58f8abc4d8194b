#include <algorithm>
#include <map>

#include "elevator/frontend.hpp"
#include "prelude_text.hpp"

namespace elevator {

namespace {

class CtorResolver {
 public:
  explicit CtorResolver(const Signature& sig) : sig_(sig) {}

  TermPtr term(const TermPtr& e) {
    if (!e) return e;
    switch (e->tag) {
      case Term::Tag::Var:
        if (is_ctor(e->name)) return with_span(tm_ctor("", "", e->name, {}), e->span);
        return e;
      case Term::Tag::One:
      case Term::Tag::Def: return e;
      case Term::Tag::App: return spine(e);
      case Term::Tag::Susp: {
        Bind b(*this, e->names);
        return set_body(e, term(e->body));
      }
      case Term::Tag::Force: {
        auto head = term(e->body);
        auto sub = subst(e->sub);
        return modify(e, [&](Term& t) {
          t.body = head;
          t.sub = sub;
        });
      }
      case Term::Tag::Store:
      case Term::Tag::TApp:
      case Term::Tag::Annot: return set_body(e, term(e->body));
      case Term::Tag::Load: {
        auto bound = term(e->body);
        Bind b(*this, {e->name});
        auto cont = term(e->cont);
        return modify(e, [&](Term& t) {
          t.body = bound;
          t.cont = cont;
        });
      }
      case Term::Tag::TLam:
      case Term::Tag::Lam: {
        Bind b(*this, {e->name});
        return set_body(e, term(e->body));
      }
      case Term::Tag::Ctor: {
        std::vector<TermPtr> args;
        for (const auto& a : e->args) args.push_back(term(a));
        return modify(e, [&](Term& t) { t.args = std::move(args); });
      }
      case Term::Tag::Match: {
        auto scrut = term(e->body);
        auto branches = e->branches;
        for (auto& br : branches) {
          Bind b(*this, br.binders);
          br.body = term(br.body);
        }
        return modify(e, [&](Term& t) {
          t.body = scrut;
          t.branches = std::move(branches);
        });
      }
    }
    return e;
  }

  Subst subst(const Subst& s) {
    Subst out = s;
    for (auto& entry : out)
      if (entry.term) entry.term = term(entry.term);
    return out;
  }

 private:
  struct Bind {
    Bind(CtorResolver& r, const std::vector<std::string>& names) : r(r), names(names) {
      for (const auto& n : names) ++r.local_[n];
    }
    ~Bind() {
      for (const auto& n : names) --r.local_[n];
    }
    CtorResolver& r;
    std::vector<std::string> names;
  };

  bool is_ctor(const std::string& name) const {
    auto it = local_.find(name);
    if (it != local_.end() && it->second > 0) return false;
    return sig_.find_ctor(name) != nullptr;
  }

  static TermPtr set_body(const TermPtr& e, TermPtr body) {
    return modify(e, [&](Term& t) { t.body = std::move(body); });
  }

  TermPtr spine(const TermPtr& e) {
    std::vector<TermPtr> args;
    TermPtr head = e;
    while (head->tag == Term::Tag::App) {
      args.push_back(head->cont);
      head = head->body;
    }
    std::reverse(args.begin(), args.end());
    bool ctor_head = (head->tag == Term::Tag::Var && is_ctor(head->name)) || head->tag == Term::Tag::Ctor;
    if (!ctor_head) {
      auto h = term(e->body);
      auto a = term(e->cont);
      return modify(e, [&](Term& t) {
        t.body = h;
        t.cont = a;
      });
    }
    std::vector<TermPtr> all;
    Mode m;
    if (head->tag == Term::Tag::Ctor) {
      all = head->args;
      m = head->hi;
    }
    for (const auto& a : args) all.push_back(a);
    for (auto& a : all) a = term(a);
    return with_span(tm_ctor("", m, head->name, std::move(all)), e->span);
  }

  const Signature& sig_;
  std::map<std::string, int> local_;
};

DataDecl instantiate_param(const SurfaceData& sd) {
  DataDecl d = sd.decl;
  auto rename = [&](const Mode& m) { return m == sd.mode_param ? Mode(kDataModeParam) : m; };
  for (auto& [name, k] : d.params) k = map_modes(k, rename);
  for (auto& c : d.ctors)
    for (auto& a : c.args) a = map_modes(a, rename);
  return d;
}

}  // namespace

const std::string& prelude_source() {
  static const std::string text = detail::kPreludeText;
  return text;
}

TermPtr resolve_constructors(const TermPtr& e, const Signature& sig) { return CtorResolver(sig).term(e); }

Subst resolve_constructors(const Subst& s, const Signature& sig) { return CtorResolver(sig).subst(s); }

Signature elaborate(const SurfaceModule& m, const ModeSpec& spec, const ElabOptions& opts) {
  Signature surface;
  if (opts.include_prelude) {
    SurfaceModule prelude = parse(prelude_source(), "<prelude>");
    for (const auto& d : prelude.datas) surface.datas.push_back(instantiate_param(d));
  }
  for (const auto& d : m.datas) surface.datas.push_back(instantiate_param(d));
  for (const auto& d : m.defs) {
    DefDecl def = d;
    def.body = resolve_constructors(d.body, surface);
    surface.defs.push_back(std::move(def));
  }
  return check_signature(surface, spec);
}

Signature prelude_signature(const ModeSpec& spec) { return elaborate(SurfaceModule{}, spec); }

}  // namespace elevator
