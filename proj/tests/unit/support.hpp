#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "elevator/frontend.hpp"
#include "elevator/mode_spec.hpp"
#include "elevator/typing.hpp"

namespace elevator::test {

inline const std::string kCorpus = ELEVATOR_CORPUS_DIR;
inline const std::string kSpecs = ELEVATOR_SPECS_DIR;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Signature elab_source(const std::string& src, const ModeSpec& spec) { return elaborate(parse(src, "t.elv"), spec); }

// Code of the error thrown by `f`, or "none".
template <class F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

}  // namespace elevator::test
