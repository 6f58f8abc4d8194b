#include "elevator/mode_spec.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace elevator {

namespace {

const char* spec_code(SpecError::Kind k) {
  switch (k) {
    case SpecError::Kind::UnknownMode: return codes::kUnknownMode;
    case SpecError::Kind::SignatureViolation: return codes::kSignatureViolation;
    case SpecError::Kind::Malformed: return codes::kConfig;
  }
  return codes::kConfig;
}

std::string rules_str(const std::set<StructRule>& rs) {
  std::string out = "{";
  bool first = true;
  for (auto r : rs) {
    if (!first) out += ",";
    out += to_string(r);
    first = false;
  }
  return out + "}";
}

}  // namespace

SpecError::SpecError(Kind kind, const std::string& message)
    : Error(spec_code(kind), message), kind_(kind) {}

std::string to_string(StructRule r) { return r == StructRule::Contraction ? "C" : "W"; }

ModeSpec ModeSpec::validate(const RawModeSpec& raw) {
  ModeSpec s;
  for (const auto& m : raw.modes) {
    if (m.empty()) throw SpecError(SpecError::Kind::Malformed, "mode names must be nonempty");
    if (s.index_.count(m)) throw SpecError(SpecError::Kind::Malformed, "duplicate mode '" + m + "'");
    s.index_[m] = s.modes_.size();
    s.modes_.push_back(m);
  }
  const size_t n = s.modes_.size();
  auto need = [&](const Mode& m) {
    auto it = s.index_.find(m);
    if (it == s.index_.end()) throw SpecError(SpecError::Kind::UnknownMode, "undeclared mode '" + m + "'");
    return it->second;
  };

  s.geq_.assign(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) s.geq_[i][i] = true;
  for (const auto& [hi, lo] : raw.order) s.geq_[need(hi)][need(lo)] = true;
  // Warshall closure
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (s.geq_[i][k])
        for (size_t j = 0; j < n; ++j)
          if (s.geq_[k][j]) s.geq_[i][j] = true;

  s.sig_.assign(n, {});
  for (const auto& [m, rules] : raw.signatures) s.sig_[need(m)] = rules;

  s.recursion_.assign(n, RecursionPolicy::None);
  for (size_t i = 0; i < n; ++i) {
    bool full = s.sig_[i].count(StructRule::Contraction) && s.sig_[i].count(StructRule::Weakening);
    s.recursion_[i] = full ? RecursionPolicy::General : RecursionPolicy::None;
  }
  for (const auto& [m, pol] : raw.recursion) s.recursion_[need(m)] = pol;

  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (!s.geq_[i][j]) continue;
      for (auto r : s.sig_[j]) {
        if (!s.sig_[i].count(r)) {
          SpecError err(SpecError::Kind::SignatureViolation,
                        "signature violation: " + s.modes_[i] + " >= " + s.modes_[j] + " but sig(" +
                            s.modes_[i] + ")=" + rules_str(s.sig_[i]) + " does not contain sig(" +
                            s.modes_[j] + ")=" + rules_str(s.sig_[j]));
          err.offending_pair = {s.modes_[i], s.modes_[j]};
          throw err;
        }
      }
    }
  return s;
}

size_t ModeSpec::idx(const Mode& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw SpecError(SpecError::Kind::UnknownMode, "undeclared mode '" + m + "'");
  return it->second;
}

bool ModeSpec::geq(const Mode& m, const Mode& k) const { return geq_[idx(m)][idx(k)]; }

bool ModeSpec::allows(const Mode& m, StructRule r) const { return sig_[idx(m)].count(r) != 0; }

RecursionPolicy ModeSpec::recursion(const Mode& m) const { return recursion_[idx(m)]; }

std::vector<std::pair<Mode, Mode>> ModeSpec::closure_pairs() const {
  std::vector<std::pair<Mode, Mode>> out;
  for (size_t i = 0; i < modes_.size(); ++i)
    for (size_t j = 0; j < modes_.size(); ++j)
      if (geq_[i][j]) out.emplace_back(modes_[i], modes_[j]);
  return out;
}

RawModeSpec ModeSpec::to_raw() const {
  RawModeSpec raw;
  raw.modes = modes_;
  raw.order = closure_pairs();
  for (size_t i = 0; i < modes_.size(); ++i) {
    raw.signatures[modes_[i]] = sig_[i];
    raw.recursion[modes_[i]] = recursion_[i];
  }
  return raw;
}

bool ModeSpec::operator==(const ModeSpec& o) const {
  return modes_ == o.modes_ && geq_ == o.geq_ && sig_ == o.sig_ && recursion_ == o.recursion_;
}

RawModeSpec parse_mode_spec_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(SpecError::Kind::Malformed, std::string("mode spec is not valid JSON: ") + e.what());
  }
  auto bad = [](const std::string& msg) { return SpecError(SpecError::Kind::Malformed, msg); };
  if (!j.is_object()) throw bad("mode spec must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key != "modes" && key != "order" && key != "signatures" && key != "recursion")
      throw bad("unknown key '" + key + "' in mode spec");
  }
  RawModeSpec raw;
  if (!j.contains("modes") || !j["modes"].is_array()) throw bad("\"modes\" must be an array of strings");
  for (const auto& m : j["modes"]) {
    if (!m.is_string()) throw bad("\"modes\" must be an array of strings");
    raw.modes.push_back(m.get<std::string>());
  }
  if (j.contains("order")) {
    if (!j["order"].is_array()) throw bad("\"order\" must be an array of [hi, lo] pairs");
    for (const auto& p : j["order"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
        throw bad("\"order\" entries must be 2-element string arrays");
      raw.order.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
  }
  if (j.contains("signatures")) {
    if (!j["signatures"].is_object()) throw bad("\"signatures\" must be an object");
    for (auto it = j["signatures"].begin(); it != j["signatures"].end(); ++it) {
      if (!it.value().is_array()) throw bad("signature of '" + it.key() + "' must be an array");
      std::set<StructRule> rules;
      for (const auto& r : it.value()) {
        if (r == "C") rules.insert(StructRule::Contraction);
        else if (r == "W") rules.insert(StructRule::Weakening);
        else throw bad("structural rules are \"C\" or \"W\"");
      }
      raw.signatures[it.key()] = rules;
    }
  }
  if (j.contains("recursion")) {
    if (!j["recursion"].is_object()) throw bad("\"recursion\" must be an object");
    for (auto it = j["recursion"].begin(); it != j["recursion"].end(); ++it) {
      if (it.value() == "general") raw.recursion[it.key()] = RecursionPolicy::General;
      else if (it.value() == "none") raw.recursion[it.key()] = RecursionPolicy::None;
      else throw bad("recursion policy must be \"general\" or \"none\"");
    }
  }
  return raw;
}

ModeSpec load_mode_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(codes::kIo, "cannot open mode spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ModeSpec::validate(parse_mode_spec_json(ss.str()));
}

namespace {
const std::set<StructRule> kFull{StructRule::Contraction, StructRule::Weakening};
}

ModeSpec code_program_spec() {
  RawModeSpec raw;
  raw.modes = {"C", "P"};
  raw.order = {{"C", "P"}};
  raw.signatures = {{"C", kFull}, {"P", kFull}};
  return ModeSpec::validate(raw);
}

ModeSpec code_program_linear_spec() {
  RawModeSpec raw;
  raw.modes = {"C", "P", "GF"};
  raw.order = {{"C", "P"}, {"P", "GF"}};
  raw.signatures = {{"C", kFull}, {"P", kFull}, {"GF", {}}};
  raw.recursion = {{"GF", RecursionPolicy::General}};
  return ModeSpec::validate(raw);
}

ModeSpec single_mode_spec() {
  RawModeSpec raw;
  raw.modes = {"U"};
  raw.signatures = {{"U", kFull}};
  return ModeSpec::validate(raw);
}

ModeSpec linear_intuitionistic_spec() {
  RawModeSpec raw;
  raw.modes = {"U", "L"};
  raw.order = {{"U", "L"}};
  raw.signatures = {{"U", kFull}, {"L", {}}};
  return ModeSpec::validate(raw);
}

}  // namespace elevator
