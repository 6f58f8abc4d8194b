#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elevator/mode_spec.hpp"
#include "elevator/syntax.hpp"

namespace elevator {

struct Signature;

struct StepResult {
  bool stepped = false;
  TermPtr term;
  std::string rule;  // force-susp, splice, load-store, beta, type-beta, delta, match
};

// Definitions are unfolded through the signature; without one, DEF is stuck.
class Evaluator {
 public:
  Evaluator(const ModeSpec& spec, const Signature* sig = nullptr) : spec_(spec), sig_(sig) {}

  StepResult step(const TermPtr& e) const;
  StepResult template_step(const TermPtr& e, const Mode& m) const;

  bool is_weak_normal(const TermPtr& e) const;
  bool is_weak_neutral(const TermPtr& e) const;
  bool is_normal_template(const TermPtr& e, const Mode& m) const;

 private:
  const ModeSpec& spec_;
  const Signature* sig_;
};

struct TraceEntry {
  size_t index;
  std::string rule;
  TermPtr term;
};

struct EvalOutcome {
  enum class Kind { Value, FuelExhausted, Stuck };
  Kind kind = Kind::Value;
  TermPtr term;
  size_t steps = 0;
};

EvalOutcome evaluate(const Evaluator& ev, const TermPtr& e, size_t fuel, std::vector<TraceEntry>* trace = nullptr);

std::string to_string(EvalOutcome::Kind k);

}  // namespace elevator
