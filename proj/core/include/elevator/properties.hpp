#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elevator/mode_spec.hpp"

namespace elevator {

struct NamedSpec {
  std::string name;
  ModeSpec spec;
};

struct PropertyOptions {
  uint64_t seed = 0x5eed;
  size_t terms = 500;   // generated terms per spec for the per-term properties
  size_t pairs = 200;   // template pairs and mode-safety pairs
  size_t fuel = 5000;
  size_t steps_checked = 80;  // reduction steps re-checked per term
};

struct PropertyResult {
  std::string name;
  std::string spec;
  size_t cases = 0;
  size_t failures = 0;
  size_t skipped = 0;
  std::string note;            // extra statistics
  std::string counterexample;  // smallest failing case seen
  bool applicable = true;
  bool ok() const { return failures == 0; }
};

// preservation (term and template reduction), progress and classifier
// agreement, occurrence counts, usage-merge laws, substitution lemma.
std::vector<PropertyResult> term_properties(const NamedSpec& spec, const PropertyOptions& opts);

// Filling the two holes of a template in either order gives the same normal template.
PropertyResult construction_order_property(const NamedSpec& spec, const PropertyOptions& opts);

// Terms that differ only at modes hidden from `observer` evaluate to values
// that still agree at the observer.
PropertyResult mode_safety_property(const NamedSpec& spec, const Mode& observer, const PropertyOptions& opts);

// Nested thunk/force substitutions of depth 1..max_depth terminate within
// a recursion-depth limit of ten times the input size and leave no redex.
PropertyResult hereditary_substitution_property(int max_depth = 10);

// The specs the property suite runs over by default.
std::vector<NamedSpec> default_property_specs();

// Everything applicable to one spec (mode safety uses every observer that
// hides at least one mode).
std::vector<PropertyResult> run_all_properties(const NamedSpec& spec, const PropertyOptions& opts);

std::string format_report(const std::vector<PropertyResult>& results);

}  // namespace elevator
