#pragma once

#include <utility>
#include <vector>

#include "elevator/mode_spec.hpp"
#include "elevator/syntax.hpp"

namespace elevator {

// One flag per context entry; true means the entry has been consumed.
// Entries for type declarations are never set.
using UsageMask = std::vector<bool>;

UsageMask empty_usage(const Context& ctx);

// Union of two consumption masks. Throws Error(SPLIT_ERROR) when a term
// variable is consumed on both sides at a mode without contraction.
UsageMask merge_usage(const Context& ctx, const ModeSpec& spec, const UsageMask& u1, const UsageMask& u2);

// Same law over the domain of a substitution, using each entry's mode.
UsageMask merge_subst_usage(const Subst& sigma, const ModeSpec& spec, const UsageMask& u1, const UsageMask& u2);

// Distributes the entries of `sigma`: type entries go to both halves, term
// entries to the halves whose mask claims them. Unclaimed term entries stay
// on the left.
std::pair<Subst, Subst> split_substitution(const Subst& sigma, const ModeSpec& spec, const UsageMask& left,
                                           const UsageMask& right);

struct NeutralResult {
  bool reduced = false;
  TypePtr type;       // reduced
  DfKindPtr kind;     // reduced
  NeutralPtr neutral; // still neutral
};

// Optional instrumentation: recursion depth reached and an optional limit.
struct SubstWatch {
  size_t max_depth = 0;
  size_t calls = 0;
  size_t limit = 0;  // 0 = unlimited; exceeding it throws SUBST_ERROR
};

TypePtr subst_type(const Subst& sigma, const DfContext& gamma, const TypePtr& t, SubstWatch* watch = nullptr);
NeutralResult subst_neutral(const Subst& sigma, const DfContext& gamma, const NeutralPtr& p,
                            SubstWatch* watch = nullptr);
TermPtr subst_term(const Subst& sigma, const DfContext& gamma, const TermPtr& e, SubstWatch* watch = nullptr);
KindPtr subst_kind(const Subst& sigma, const DfContext& gamma, const KindPtr& k, SubstWatch* watch = nullptr);
Context subst_context(const Subst& sigma, const DfContext& gamma, const Context& ctx, SubstWatch* watch = nullptr);
Subst subst_subst(const Subst& sigma, const DfContext& gamma, const Subst& tau, SubstWatch* watch = nullptr);

TypePtr single_subst_type(const std::string& a, const TypePtr& arg, const DfKindPtr& kind, const TypePtr& target);
KindPtr single_subst_kind(const std::string& a, const TypePtr& arg, const DfKindPtr& kind, const KindPtr& target);
TermPtr single_subst_term(const std::string& x, const TermPtr& arg, const Mode& k, const TermPtr& target);
TermPtr single_subst_term_type(const std::string& a, const TypePtr& arg, const DfKindPtr& kind,
                               const TermPtr& target);

// Measure context read off the kinds recorded on the entries of `sigma`.
DfContext measure_of(const Subst& sigma);

}  // namespace elevator
