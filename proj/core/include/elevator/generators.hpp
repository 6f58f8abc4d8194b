#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>

#include "elevator/mode_spec.hpp"
#include "elevator/syntax.hpp"
#include "elevator/typing.hpp"

namespace elevator {

struct GenOptions {
  int type_depth = 2;
  int term_depth = 3;
  // When set, subterms at modes not accessible from the observer are drawn
  // from a separate random stream selected by `variant`, with the enclosing
  // context hidden. Two generators that differ only in `variant` then produce
  // terms that agree everywhere the observer can see.
  std::optional<Mode> observer;
  int variant = 0;
};

struct GeneratedTerm {
  Context ctx;
  TermPtr term;  // checked and elaborated
  TypePtr type;
  Mode mode;
};

// Rule-directed random construction of well-typed terms. Every returned term
// has passed the checker; candidates it rejects are counted and discarded.
class Generator {
 public:
  Generator(const ModeSpec& spec, const Signature& sig, uint64_t seed, GenOptions opts = {});
  ~Generator();
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  // Closed type at mode k (no free type variables).
  TypePtr type_at(const Mode& k, int depth);
  // Random context of term declarations at assorted modes.
  Context context(size_t max_entries);

  std::optional<GeneratedTerm> closed_term(const Mode& k);
  std::optional<GeneratedTerm> closed_term_of(const TypePtr& t);
  std::optional<GeneratedTerm> open_term(const Context& ctx, const TypePtr& t);

  std::mt19937_64& rng();
  const Mode& random_mode();
  size_t rejected() const;
  // Set when the last request failed because an inaccessible region could
  // not be filled (mode-safety pairs are then skipped as a whole).
  bool fork_failed() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// Nested thunk/force family used to stress hereditary substitution: the
// returned type forces a variable of a depth-`d` higher-order kind, and the
// substitution instantiates it so that `d` reductions cascade.
struct NestedRedex {
  TypePtr type;
  Subst subst;
  DfContext gamma;
};
NestedRedex nested_redex_family(int depth, const Mode& k);

}  // namespace elevator
