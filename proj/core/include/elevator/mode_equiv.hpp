#pragma once

#include "elevator/mode_spec.hpp"
#include "elevator/syntax.hpp"

namespace elevator {

struct Signature;

// Equivalence over an observer mode: both sides agree syntactically (up to
// bound names) everywhere except at subterms whose mode is not accessible from
// `observer`. Inputs are assumed to be checked already; these functions only
// compare.
bool equiv_context(const Context& a, const Context& b, const Mode& observer, const ModeSpec& spec);
bool equiv_kind(const KindPtr& a, const KindPtr& b, const Mode& observer, const ModeSpec& spec);
bool equiv_type(const TypePtr& a, const TypePtr& b, const Mode& observer, const ModeSpec& spec);
// `k` is the mode of the judgment both terms inhabit.
bool equiv_term(const TermPtr& a, const TermPtr& b, const Mode& k, const Mode& observer, const ModeSpec& spec);
bool equiv_subst(const Subst& a, const Subst& b, const Mode& observer, const ModeSpec& spec);

struct TypedTerm {
  Context ctx;
  TermPtr term;
  TypePtr type;
};

// Checks both sides first (throws the checker's Error when either is
// ill-typed), then compares contexts, types and terms.
bool equiv_typed_term(const TypedTerm& a, const TypedTerm& b, const Mode& observer, const ModeSpec& spec,
                      const Signature& sig);

}  // namespace elevator
