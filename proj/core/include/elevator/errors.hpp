#pragma once

#include <stdexcept>
#include <string>

namespace elevator {

struct SourceSpan {
  std::string file;
  int line = 0;
  int col = 0;
};

// Every failure surfaced to users carries a stable machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, SourceSpan span = {})
      : std::runtime_error(message), code_(std::move(code)), span_(std::move(span)) {}

  const std::string& code() const { return code_; }
  const SourceSpan& span() const { return span_; }
  void set_span(SourceSpan s) { span_ = std::move(s); }

 private:
  std::string code_;
  SourceSpan span_;
};

namespace codes {
inline constexpr const char* kUnknownMode = "UNKNOWN_MODE";
inline constexpr const char* kSignatureViolation = "SIGNATURE_VIOLATION";
inline constexpr const char* kConfig = "CONFIG";
inline constexpr const char* kIo = "IO";
inline constexpr const char* kParse = "PARSE";
inline constexpr const char* kElab = "ELAB";
inline constexpr const char* kUnbound = "UNBOUND";
inline constexpr const char* kModeAccess = "MODE_ACCESS";
inline constexpr const char* kLinearity = "LINEARITY";
inline constexpr const char* kWeakening = "WEAKENING";
inline constexpr const char* kKindMismatch = "KIND_MISMATCH";
inline constexpr const char* kTypeMismatch = "TYPE_MISMATCH";
inline constexpr const char* kContextMismatch = "CONTEXT_MISMATCH";
inline constexpr const char* kDomainMismatch = "DOMAIN_MISMATCH";
inline constexpr const char* kRecursion = "RECURSION_FORBIDDEN";
inline constexpr const char* kCannotSynth = "CANNOT_SYNTH";
inline constexpr const char* kArity = "ARITY";
inline constexpr const char* kNonExhaustive = "NON_EXHAUSTIVE";
inline constexpr const char* kSubst = "SUBST_ERROR";
inline constexpr const char* kSplit = "SPLIT_ERROR";
inline constexpr const char* kFuel = "FUEL";
inline constexpr const char* kStuck = "STUCK";
inline constexpr const char* kProperty = "PROPERTY";
}  // namespace codes

}  // namespace elevator
