#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "elevator/errors.hpp"
#include "elevator/mode_spec.hpp"

namespace elevator {

struct Kind;
struct Type;
struct Neutral;
struct Term;
struct DfKind;

using KindPtr = std::shared_ptr<const Kind>;
using TypePtr = std::shared_ptr<const Type>;
using NeutralPtr = std::shared_ptr<const Neutral>;
using TermPtr = std::shared_ptr<const Term>;
using DfKindPtr = std::shared_ptr<const DfKind>;

// Which namespace a binder or substitution entry lives in. `Either` only
// occurs in unelaborated substitution entries coming from the parser.
enum class Sort { TypeVar, TermVar, Either };

struct Decl {
  Sort sort = Sort::TermVar;
  std::string name;
  KindPtr kind;  // TypeVar
  TypePtr type;  // TermVar
  Mode mode;     // mode of the kind or type; may be empty before elaboration
};
using Context = std::vector<Decl>;
using ErasedContext = std::vector<std::string>;

struct SubstEntry {
  Sort sort = Sort::TermVar;
  std::string name;
  TypePtr type;     // TypeVar (or the type reading of an Either entry)
  TermPtr term;     // TermVar (or the term reading of an Either entry)
  Mode mode;        // x |->_k e carries k; type entries carry the kind's mode
  DfKindPtr kind;   // erased kind of a type entry, filled by elaboration
};
using Subst = std::vector<SubstEntry>;

// Dependency-free kinds and contexts: term declarations keep only a name.
struct DfEntry {
  std::string name;
  DfKindPtr kind;  // null for term variables
};
using DfContext = std::vector<DfEntry>;

struct DfKind {
  enum class Tag { Type, CtxUp };
  Tag tag = Tag::Type;
  Mode hi, lo;
  DfContext ctx;
  DfKindPtr body;
};

struct Kind {
  enum class Tag { Type, CtxUp };
  Tag tag = Tag::Type;
  Mode hi;  // Type@hi, or Up<hi,lo>
  Mode lo;
  Context ctx;
  KindPtr body;
};

struct Neutral {
  enum class Tag { Var, Force };
  Tag tag = Tag::Var;
  std::string name;  // Var
  NeutralPtr head;   // Force
  Subst sub;
  Mode hi, lo;
};

struct Type {
  // `Redex` is surface-only: a force whose head is a literal thunk. The
  // elaborator removes it; checked types never contain one.
  enum class Tag { Unit, Neutral, Thunk, CtxUp, Down, Forall, Arrow, Data, Redex };
  Tag tag = Tag::Unit;
  Mode mode;
  NeutralPtr neutral;      // Neutral
  ErasedContext names;     // Thunk
  Mode hi, lo;             // Thunk, CtxUp, Down
  Context ctx;             // CtxUp
  TypePtr body;            // Thunk, CtxUp, Down, Forall body; Arrow domain; Redex head
  TypePtr cod;             // Arrow
  std::string var;         // Forall
  KindPtr kind;            // Forall
  std::string data_name;   // Data
  std::vector<TypePtr> args;
  Subst sub;               // Redex
  SourceSpan span;
};

struct Branch {
  std::string ctor;
  std::vector<std::string> binders;
  TermPtr body;
};

struct Term {
  enum class Tag { Var, One, Susp, Force, Store, Load, TLam, TApp, Lam, App, Ctor, Match, Def, Annot };
  Tag tag = Tag::Var;
  std::string name;        // Var, Def, binder of Load/TLam/Lam, constructor of Ctor
  Mode hi, lo;             // modal forms; One/Ctor/Match keep their mode in hi
  ErasedContext names;     // Susp
  TermPtr body;            // principal subterm
  TermPtr cont;            // Load continuation, App argument
  Subst sub;               // Force
  KindPtr kind;            // TLam
  TypePtr type;            // TApp argument, Lam annotation, Annot
  std::string data_name;   // Ctor
  std::vector<TermPtr> args;
  std::vector<Branch> branches;
  SourceSpan span;
};

// ---- construction ----------------------------------------------------------

KindPtr kind_type(const Mode& m);
KindPtr kind_up(const Mode& hi, const Mode& lo, Context ctx, KindPtr body);

NeutralPtr neu_var(const std::string& name);
NeutralPtr neu_force(NeutralPtr head, Subst sub, const Mode& hi, const Mode& lo);

TypePtr ty_unit(const Mode& k);
TypePtr ty_neutral(NeutralPtr p, const Mode& k);
TypePtr ty_var(const std::string& name, const Mode& k);
TypePtr ty_thunk(ErasedContext names, TypePtr body, const Mode& hi);
TypePtr ty_up(const Mode& hi, const Mode& lo, Context ctx, TypePtr body);
TypePtr ty_down(const Mode& hi, const Mode& lo, TypePtr body);
TypePtr ty_forall(const std::string& var, KindPtr kind, TypePtr body);
TypePtr ty_arrow(TypePtr dom, TypePtr cod);
TypePtr ty_data(const std::string& name, const Mode& m, std::vector<TypePtr> args);

TermPtr tm_var(const std::string& x);
TermPtr tm_one(const Mode& k);
TermPtr tm_susp(const Mode& hi, const Mode& lo, ErasedContext names, TermPtr body);
TermPtr tm_force(const Mode& hi, const Mode& lo, TermPtr head, Subst sub);
TermPtr tm_store(const Mode& hi, const Mode& lo, TermPtr body);
TermPtr tm_load(const Mode& hi, const Mode& lo, const std::string& x, TermPtr bound, TermPtr cont);
TermPtr tm_tlam(const std::string& a, KindPtr kind, TermPtr body);
TermPtr tm_tapp(TermPtr head, TypePtr arg);
TermPtr tm_lam(const std::string& x, TypePtr ann, TermPtr body);
TermPtr tm_app(TermPtr head, TermPtr arg);
TermPtr tm_ctor(const std::string& data, const Mode& m, const std::string& ctor, std::vector<TermPtr> args);
TermPtr tm_match(const Mode& m, TermPtr scrut, std::vector<Branch> branches);
TermPtr tm_def(const std::string& name);
TermPtr tm_annot(TermPtr e, TypePtr type);

Decl decl_type(const std::string& a, KindPtr k);
Decl decl_term(const std::string& x, TypePtr t);
SubstEntry sub_type(const std::string& a, TypePtr t, DfKindPtr kind = nullptr);
SubstEntry sub_term(const std::string& x, TermPtr e, const Mode& k);

// Copy-and-modify helpers for immutable nodes.
TermPtr with_span(TermPtr e, const SourceSpan& span);
template <class T, class F>
std::shared_ptr<const T> modify(const std::shared_ptr<const T>& p, F&& f) {
  auto copy = std::make_shared<T>(*p);
  f(*copy);
  return copy;
}

// ---- erasure and names -----------------------------------------------------

DfKindPtr erase_kind(const KindPtr& k);
DfContext erase_context(const Context& ctx);
ErasedContext names_of(const Context& ctx);
DfKindPtr df_type(const Mode& m);

Mode mode_of(const KindPtr& k);

// ---- free variables (both sorts share one namespace) -----------------------

std::set<std::string> fv(const KindPtr& k);
std::set<std::string> fv(const TypePtr& t);
std::set<std::string> fv(const NeutralPtr& p);
std::set<std::string> fv(const TermPtr& e);
std::set<std::string> fv(const Subst& s);
void fv_into(const KindPtr& k, std::set<std::string>& out);
void fv_into(const TypePtr& t, std::set<std::string>& out);
void fv_into(const NeutralPtr& p, std::set<std::string>& out);
void fv_into(const TermPtr& e, std::set<std::string>& out);
void fv_into(const Subst& s, std::set<std::string>& out);

// Deterministic: `base` itself if free, else base', base'', then base1, base2...
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// ---- alpha equivalence -----------------------------------------------------

bool alpha_eq(const KindPtr& a, const KindPtr& b);
bool alpha_eq(const TypePtr& a, const TypePtr& b);
bool alpha_eq(const NeutralPtr& a, const NeutralPtr& b);
bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const Subst& a, const Subst& b);
bool alpha_eq(const Context& a, const Context& b);
bool alpha_eq(const DfKindPtr& a, const DfKindPtr& b);

// ---- structure ---------------------------------------------------------------

size_t size(const KindPtr& k);
size_t size(const TypePtr& t);
size_t size(const NeutralPtr& p);
size_t size(const TermPtr& e);

// True iff a surface Redex remains somewhere. False for every type the
// library hands out after elaboration.
bool has_type_redex(const TypePtr& t);
bool has_type_redex(const TermPtr& e);

// Rewrites every mode string through `f` (used to instantiate data declarations).
TypePtr map_modes(const TypePtr& t, const std::function<Mode(const Mode&)>& f);
KindPtr map_modes(const KindPtr& k, const std::function<Mode(const Mode&)>& f);

}  // namespace elevator
