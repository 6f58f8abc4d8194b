#pragma once

#include <string>

#include "elevator/syntax.hpp"

namespace elevator {

struct Signature;

struct PrintOptions {
  // Print the mode indices of modal terms as `susp<hi,lo>` etc. The output
  // is then for debugging only and no longer parses.
  bool show_modes = false;
};

std::string print_kind(const KindPtr& k, const PrintOptions& opts = {});
std::string print_type(const TypePtr& t, const PrintOptions& opts = {});
std::string print_term(const TermPtr& e, const PrintOptions& opts = {});
std::string print_context(const Context& ctx, const PrintOptions& opts = {});
std::string print_subst(const Subst& s, const PrintOptions& opts = {});
// Data declarations and definitions in source syntax.
std::string print_signature(const Signature& sig, const PrintOptions& opts = {});

}  // namespace elevator
