#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elevator/mode_spec.hpp"
#include "elevator/syntax.hpp"
#include "elevator/typing.hpp"

namespace elevator {

// ---- lexing ------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Keyword, Number, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int col = 0;
};

// `--` starts a line comment. Throws Error(PARSE) on a stray character.
std::vector<Token> lex(const std::string& source, const std::string& file = "");

// ---- parsing -----------------------------------------------------------------

struct SurfaceData {
  DataDecl decl;           // mode parameter still spelled `mode_param`
  std::string mode_param;
};

struct SurfaceModule {
  std::string file;
  std::optional<std::string> modes_pragma;  // `modes "spec.json"`
  SourceSpan pragma_span;
  std::vector<SurfaceData> datas;
  std::vector<DefDecl> defs;
};

// Throws Error(PARSE) with the expected tokens and the offending position.
SurfaceModule parse(const std::string& source, const std::string& file = "");
TermPtr parse_term(const std::string& source);
TypePtr parse_type(const std::string& source);
KindPtr parse_kind(const std::string& source);

// ---- elaboration -------------------------------------------------------------

struct ElabOptions {
  bool include_prelude = true;
};

// The shipped prelude declaring Nat and List.
const std::string& prelude_source();

// Resolves constructor applications, instantiates data mode parameters, and
// runs the checker over the whole signature.
Signature elaborate(const SurfaceModule& m, const ModeSpec& spec, const ElabOptions& opts = {});

// Just the prelude, checked against `spec`.
Signature prelude_signature(const ModeSpec& spec);

// Rewrites unannotated constructor spines `C e1 .. en` (where C is not shadowed
// by a local binder) into constructor nodes. Applied to REPL input and to
// every definition body by `elaborate`.
TermPtr resolve_constructors(const TermPtr& e, const Signature& sig);
Subst resolve_constructors(const Subst& s, const Signature& sig);

}  // namespace elevator
