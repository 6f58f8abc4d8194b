#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "elevator/errors.hpp"

namespace elevator {

using Mode = std::string;

enum class StructRule { Contraction, Weakening };
enum class RecursionPolicy { General, None };

class SpecError : public Error {
 public:
  enum class Kind { UnknownMode, SignatureViolation, Malformed };

  SpecError(Kind kind, const std::string& message);

  Kind kind() const { return kind_; }
  // Set for SignatureViolation: the pair (hi, lo) with hi >= lo whose signatures break containment.
  std::pair<Mode, Mode> offending_pair;

 private:
  Kind kind_;
};

// Unvalidated input, as read from a config file or built in code.
struct RawModeSpec {
  std::vector<Mode> modes;
  std::vector<std::pair<Mode, Mode>> order;  // (hi, lo) means hi >= lo
  std::map<Mode, std::set<StructRule>> signatures;
  std::map<Mode, RecursionPolicy> recursion;
};

class ModeSpec {
 public:
  static ModeSpec validate(const RawModeSpec& raw);

  bool has(const Mode& m) const { return index_.count(m) != 0; }
  bool geq(const Mode& m, const Mode& k) const;
  bool gt(const Mode& m, const Mode& k) const { return geq(m, k) && !geq(k, m); }
  bool allows(const Mode& m, StructRule r) const;
  RecursionPolicy recursion(const Mode& m) const;

  const std::vector<Mode>& modes() const { return modes_; }
  // The stored closure, as explicit pairs (including reflexive ones).
  std::vector<std::pair<Mode, Mode>> closure_pairs() const;
  RawModeSpec to_raw() const;

  bool operator==(const ModeSpec& other) const;

 private:
  size_t idx(const Mode& m) const;

  std::vector<Mode> modes_;
  std::map<Mode, size_t> index_;
  std::vector<std::vector<bool>> geq_;
  std::vector<std::set<StructRule>> sig_;
  std::vector<RecursionPolicy> recursion_;
};

RawModeSpec parse_mode_spec_json(const std::string& text);
ModeSpec load_mode_spec_file(const std::string& path);

// C >= P, both with contraction and weakening.
ModeSpec code_program_spec();
// C > P > GF; GF admits no structural rules. Recursion is general at every mode.
ModeSpec code_program_linear_spec();
// A single intuitionistic mode U.
ModeSpec single_mode_spec();
// U >= L where L is linear.
ModeSpec linear_intuitionistic_spec();

std::string to_string(StructRule r);

}  // namespace elevator
