#include "elevator/printer.hpp"

#include <sstream>

#include "elevator/typing.hpp"

namespace elevator {

namespace {

// Precedence levels: 0 binders and arrows, 1 applications and prefix
// operators, 2 atoms.
class Printer {
 public:
  explicit Printer(const PrintOptions& o) : opts_(o) {}

  std::string kind(const KindPtr& k) {
    if (!k) return "?";
    if (k->tag == Kind::Tag::Type) return "Type@" + k->hi;
    return "Up<" + k->hi + "," + k->lo + ">[" + ctx_list(k->ctx) + "|- " + kind(k->body) + "]";
  }

  std::string ctx_list(const Context& ctx) {
    std::string s;
    for (size_t i = 0; i < ctx.size(); ++i) {
      if (i) s += ", ";
      s += decl(ctx[i]);
    }
    if (!s.empty()) s += " ";
    return s;
  }

  std::string decl(const Decl& d) {
    if (d.sort == Sort::TypeVar) return d.name + " : " + kind(d.kind);
    return d.name + " : " + type(d.type, 0);
  }

  std::string type(const TypePtr& t, int prec) {
    if (!t) return "?";
    switch (t->tag) {
      case Type::Tag::Unit: return "Unit@" + t->mode;
      case Type::Tag::Neutral: return neutral(t->neutral);
      case Type::Tag::Thunk: return "thunk (" + names(t->names) + ". " + type(t->body, 0) + ")";
      case Type::Tag::CtxUp:
        return "Up<" + t->hi + "," + t->lo + ">[" + ctx_list(t->ctx) + "|- " + type(t->body, 0) + "]";
      case Type::Tag::Down: return wrap(prec > 1, "Down<" + t->hi + "," + t->lo + "> " + type(t->body, 1));
      case Type::Tag::Forall:
        return wrap(prec > 0, "forall " + t->var + " : " + kind(t->kind) + " . " + type(t->body, 0));
      case Type::Tag::Arrow: return wrap(prec > 0, type(t->body, 1) + " -> " + type(t->cod, 0));
      case Type::Tag::Data: {
        std::string s = t->data_name + "{" + t->mode + "}";
        if (t->args.empty()) return s;
        for (const auto& a : t->args) s += " " + type(a, 2);
        return wrap(prec > 1, s);
      }
      case Type::Tag::Redex: return "force " + type(t->body, 2) + " @ (" + subst(t->sub) + ")";
    }
    return "?";
  }

  std::string neutral(const NeutralPtr& p) {
    if (p->tag == Neutral::Tag::Var) return p->name;
    std::string head = p->head->tag == Neutral::Tag::Var ? p->head->name : "(" + neutral(p->head) + ")";
    return "force" + modes(p->hi, p->lo) + " " + head + " @ (" + subst(p->sub) + ")";
  }

  std::string subst(const Subst& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) out += ", ";
      const auto& e = s[i];
      if (e.sort == Sort::TermVar || (e.sort == Sort::Either && !e.type)) out += term(e.term, 0);
      else out += type(e.type, 0);
    }
    return out;
  }

  std::string term(const TermPtr& e, int prec) {
    if (!e) return "?";
    switch (e->tag) {
      case Term::Tag::Var:
      case Term::Tag::Def: return e->name;
      case Term::Tag::One: return e->hi.empty() ? "unit" : "unit@" + e->hi;
      case Term::Tag::Susp:
        return "susp" + modes(e->hi, e->lo) + " (" + names(e->names) + ". " + term(e->body, 0) + ")";
      case Term::Tag::Force:
        return "force" + modes(e->hi, e->lo) + " " + term(e->body, 2) + " @ (" + subst(e->sub) + ")";
      case Term::Tag::Store: return wrap(prec > 1, "store" + modes(e->hi, e->lo) + " " + term(e->body, 1));
      case Term::Tag::Load:
        return wrap(prec > 0, "load" + modes(e->hi, e->lo) + " " + e->name + " = " + term(e->body, 1) + " in " +
                                  term(e->cont, 0));
      case Term::Tag::TLam:
        return wrap(prec > 0, "/\\" + e->name + (e->kind ? " : " + kind(e->kind) : "") + " . " + term(e->body, 0));
      case Term::Tag::Lam:
        return wrap(prec > 0, "\\" + e->name + (e->type ? " : " + type(e->type, 0) : "") + " . " + term(e->body, 0));
      case Term::Tag::TApp: return wrap(prec > 1, head(e->body) + " [" + type(e->type, 0) + "]");
      case Term::Tag::App: return wrap(prec > 1, head(e->body) + " " + term(e->cont, 2));
      case Term::Tag::Ctor: {
        std::string s = e->name + (e->hi.empty() ? "" : "{" + e->hi + "}");
        if (e->args.empty()) return s;
        for (const auto& a : e->args) s += " " + term(a, 2);
        return wrap(prec > 1, s);
      }
      case Term::Tag::Match: {
        std::string s = "match" + (opts_.show_modes ? "<" + e->hi + ">" : std::string()) + " " + term(e->body, 1) +
                        " with";
        for (size_t i = 0; i < e->branches.size(); ++i) {
          const auto& b = e->branches[i];
          s += " | " + b.ctor;
          for (const auto& x : b.binders) s += " " + x;
          bool last = i + 1 == e->branches.size();
          s += " => " + term(b.body, last ? 0 : 1);
        }
        return wrap(prec > 0, s);
      }
      case Term::Tag::Annot: return "(" + term(e->body, 0) + " : " + type(e->type, 0) + ")";
    }
    return "?";
  }

 private:
  // Application heads: spines are left-nested, anything else needs parens.
  std::string head(const TermPtr& h) {
    if (h->tag == Term::Tag::App || h->tag == Term::Tag::TApp) return term(h, 1);
    if (h->tag == Term::Tag::Ctor && !h->args.empty()) return "(" + term(h, 0) + ")";
    return term(h, 2);
  }

  static std::string wrap(bool paren, const std::string& s) { return paren ? "(" + s + ")" : s; }

  std::string modes(const Mode& hi, const Mode& lo) const {
    if (!opts_.show_modes) return "";
    return "<" + hi + "," + lo + ">";
  }

  static std::string names(const ErasedContext& ns) {
    std::string s;
    for (size_t i = 0; i < ns.size(); ++i) {
      if (i) s += ", ";
      s += ns[i];
    }
    if (!s.empty()) s += " ";
    return s;
  }

  PrintOptions opts_;
};

}  // namespace

std::string print_kind(const KindPtr& k, const PrintOptions& opts) { return Printer(opts).kind(k); }
std::string print_type(const TypePtr& t, const PrintOptions& opts) { return Printer(opts).type(t, 0); }
std::string print_term(const TermPtr& e, const PrintOptions& opts) { return Printer(opts).term(e, 0); }
std::string print_context(const Context& ctx, const PrintOptions& opts) {
  std::string s = Printer(opts).ctx_list(ctx);
  if (!s.empty()) s.pop_back();
  return s;
}
std::string print_subst(const Subst& s, const PrintOptions& opts) { return Printer(opts).subst(s); }

std::string print_signature(const Signature& sig, const PrintOptions& opts) {
  Printer p(opts);
  std::ostringstream out;
  auto to_param = [](const Mode& m) { return m == kDataModeParam ? Mode("m") : m; };
  for (const auto& d : sig.datas) {
    out << "data " << d.name << " {m}";
    for (const auto& [name, k] : d.params) out << " (" << name << " : " << p.kind(map_modes(k, to_param)) << ")";
    out << " =";
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      out << (i ? " | " : " ") << d.ctors[i].name;
      for (const auto& a : d.ctors[i].args) out << " " << p.type(map_modes(a, to_param), 2);
    }
    out << "\n";
  }
  for (const auto& d : sig.defs) {
    out << "def " << d.name << " : " << p.type(d.type, 0) << " =\n  " << p.term(d.body, 0) << "\n";
  }
  return out.str();
}

}  // namespace elevator
