#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elevator/mode_spec.hpp"
#include "elevator/substitution.hpp"
#include "elevator/syntax.hpp"

namespace elevator {

// The mode parameter of a data declaration is spelled with this reserved name
// inside constructor argument types and parameter kinds.
inline constexpr const char* kDataModeParam = "?m";

struct CtorDecl {
  std::string name;
  std::vector<TypePtr> args;
};

struct DataDecl {
  std::string name;
  std::vector<std::pair<std::string, KindPtr>> params;
  std::vector<CtorDecl> ctors;
  SourceSpan span;

  // Filled by checking: per mode at which the declaration is well-formed,
  // the elaborated parameter kinds and constructor argument types.
  struct Instance {
    std::vector<KindPtr> param_kinds;
    std::vector<std::vector<TypePtr>> ctor_args;
  };
  std::map<Mode, Instance> instances;
};

struct DefDecl {
  std::string name;
  TypePtr type;
  TermPtr body;
  SourceSpan span;
};

struct Signature {
  std::vector<DataDecl> datas;
  std::vector<DefDecl> defs;

  const DataDecl* find_data(const std::string& name) const;
  const DefDecl* find_def(const std::string& name) const;
  // Data declaration owning constructor `ctor`, or null.
  const DataDecl* find_ctor(const std::string& ctor, size_t* index = nullptr) const;
};

// Constructor argument types of `data` at mode `m` with parameters instantiated.
std::vector<TypePtr> ctor_arg_types(const DataDecl& data, size_t ctor, const Mode& m,
                                    const std::vector<TypePtr>& params);

struct CheckOptions {
  // Report unconsumed non-weakenable variables of the supplied context.
  bool require_exhaustive_use = true;
};

struct CheckResult {
  TermPtr term;
  UsageMask usage;
};

struct SynthResult {
  TypePtr type;
  TermPtr term;
  UsageMask usage;
};

struct SubstResult {
  Subst subst;
  UsageMask usage;
};

// Well-formedness; each returns the elaborated (normalized) object.
Context wf_context(const Context& ctx, const ModeSpec& spec, const Signature& sig);
KindPtr wf_kind(const Context& ctx, const KindPtr& k, const ModeSpec& spec, const Signature& sig);
TypePtr check_type(const Context& ctx, const TypePtr& t, const KindPtr& k, const ModeSpec& spec,
                   const Signature& sig);
// Synthesizes the kind of any type form except a bare thunk.
std::pair<TypePtr, KindPtr> synth_type(const Context& ctx, const TypePtr& t, const ModeSpec& spec,
                                       const Signature& sig);
KindPtr synth_neutral_type(const Context& ctx, const NeutralPtr& p, const ModeSpec& spec, const Signature& sig);

CheckResult check_term(const Context& ctx, const TermPtr& e, const TypePtr& t, const ModeSpec& spec,
                       const Signature& sig, const CheckOptions& opts = {});
// Synthesizes at judgment mode `k`; the returned type has a mode j with j >= k.
SynthResult synth_term(const Context& ctx, const TermPtr& e, const Mode& k, const ModeSpec& spec,
                       const Signature& sig, const CheckOptions& opts = {});
SubstResult check_subst(const Context& ctx, const Subst& sigma, const Context& target, const ModeSpec& spec,
                        const Signature& sig, const CheckOptions& opts = {});

// Checks data declarations and definitions in order and returns the
// elaborated signature.
Signature check_signature(const Signature& sig, const ModeSpec& spec);

// Free occurrences of term variable `x`; a match counts its scrutinee plus
// its most demanding branch.
size_t count_occurrences(const TermPtr& e, const std::string& x);

}  // namespace elevator
