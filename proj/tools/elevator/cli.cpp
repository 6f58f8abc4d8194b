#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "elevator/evaluator.hpp"
#include "elevator/frontend.hpp"
#include "elevator/printer.hpp"
#include "elevator/properties.hpp"
#include "elevator/typing.hpp"

namespace elevator::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace exit_code;

int exit_for(const std::string& code) {
  if (code == codes::kParse || code == codes::kElab || code == codes::kUnbound || code == codes::kArity)
    return kParse;
  if (code == codes::kConfig || code == codes::kIo || code == codes::kSignatureViolation) return kConfig;
  if (code == codes::kFuel) return kFuel;
  if (code == codes::kProperty) return kProperty;
  return kType;
}

class Reporter {
 public:
  Reporter(bool as_json, std::ostream& out, std::ostream& err) : json_(as_json), out_(out), err_(err) {}

  bool json_mode() const { return json_; }

  void diag(const std::string& code, const std::string& message, const SourceSpan& span) {
    if (json_) {
      out_ << json{{"code", code}, {"message", message}, {"file", span.file}, {"line", span.line}, {"col", span.col}}
                  .dump()
           << "\n";
      return;
    }
    if (!span.file.empty()) {
      err_ << span.file;
      if (span.line) err_ << ":" << span.line << ":" << span.col;
      err_ << ": ";
    }
    err_ << "error[" << code << "] " << message << "\n";
  }

  void diag(const Error& e, const std::string& file) {
    SourceSpan span = e.span();
    if (span.file.empty()) span.file = file;
    diag(e.code(), e.what(), span);
  }

  std::ostream& out() { return out_; }

 private:
  bool json_;
  std::ostream& out_;
  std::ostream& err_;
};

struct Options {
  std::string modes;
  std::string entry = "main";
  size_t fuel = 100000;
  std::string format = "text";
  uint64_t seed = PropertyOptions{}.seed;
  size_t count = 500;
  std::optional<size_t> pairs;
  std::vector<std::string> files;
};

std::optional<std::string> env_modes() {
  const char* v = std::getenv("ELEVATOR_MODES");
  if (v && *v) return std::string(v);
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(codes::kIo, "cannot read '" + path + "'", {path, 0, 0});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Mode spec for a source file: --modes, then the file's pragma (relative to
// the file), then ELEVATOR_MODES, then the two-mode default.
ModeSpec resolve_spec(const Options& o, const SurfaceModule* m, const std::string& file) {
  if (!o.modes.empty()) return load_mode_spec_file(o.modes);
  if (m && m->modes_pragma) {
    fs::path p(*m->modes_pragma);
    if (p.is_relative()) p = fs::path(file).parent_path() / p;
    try {
      return load_mode_spec_file(p.string());
    } catch (Error& e) {
      if (e.span().line == 0) e.set_span(m->pragma_span);
      throw;
    }
  }
  if (auto env = env_modes()) return load_mode_spec_file(*env);
  return code_program_spec();
}

struct Loaded {
  SurfaceModule module;
  ModeSpec spec;
  Signature sig;
};

// Returns the exit code; fills `out` on success.
int load(const Options& o, const std::string& file, Reporter& rep, Loaded& out) {
  std::string text;
  try {
    text = read_file(file);
    out.module = parse(text, file);
  } catch (const Error& e) {
    rep.diag(e, file);
    return exit_for(e.code());
  }
  try {
    out.spec = resolve_spec(o, &out.module, file);
  } catch (const Error& e) {
    rep.diag(e, file);
    return kConfig;
  }
  try {
    out.sig = elaborate(out.module, out.spec);
  } catch (const Error& e) {
    rep.diag(e, file);
    return exit_for(e.code());
  }
  return kOk;
}

int cmd_check(const Options& o, Reporter& rep) {
  int status = kOk;
  for (const auto& file : o.files) {
    Loaded l;
    int rc = load(o, file, rep, l);
    if (rc != kOk) {
      if (status == kOk) status = rc;
      continue;
    }
    for (const auto& d : l.sig.defs) {
      if (rep.json_mode()) {
        rep.out() << json{{"status", "ok"}, {"file", file}, {"definition", d.name}, {"type", print_type(d.type)}}.dump()
                  << "\n";
      } else {
        rep.out() << "OK " << d.name << " : " << print_type(d.type) << "\n";
      }
    }
  }
  return status;
}

int report_outcome(const EvalOutcome& r, size_t fuel, Reporter& rep, const std::string& file) {
  switch (r.kind) {
    case EvalOutcome::Kind::Value: return kOk;
    case EvalOutcome::Kind::FuelExhausted:
      rep.diag(codes::kFuel, "fuel exhausted after " + std::to_string(fuel) + " steps", {file, 0, 0});
      return kFuel;
    case EvalOutcome::Kind::Stuck:
      rep.diag(codes::kStuck, "evaluation stuck at " + print_term(r.term), {file, 0, 0});
      return kType;
  }
  return kType;
}

int cmd_run(const Options& o, Reporter& rep, bool trace) {
  const auto& file = o.files.front();
  Loaded l;
  if (int rc = load(o, file, rep, l); rc != kOk) return rc;
  const DefDecl* def = l.sig.find_def(o.entry);
  if (!def) {
    rep.diag(codes::kUnbound, "no definition named '" + o.entry + "'", {file, 0, 0});
    return kParse;
  }
  Evaluator ev(l.spec, &l.sig);
  std::vector<TraceEntry> steps;
  auto r = evaluate(ev, def->body, o.fuel, trace ? &steps : nullptr);
  for (const auto& s : steps) {
    if (rep.json_mode())
      rep.out() << json{{"index", s.index}, {"rule", s.rule}, {"term", print_term(s.term)}}.dump() << "\n";
    else
      rep.out() << "[" << s.index << "] " << s.rule << ": " << print_term(s.term) << "\n";
  }
  int rc = report_outcome(r, o.fuel, rep, file);
  if (rc != kOk) return rc;
  if (rep.json_mode()) {
    rep.out() << json{{"result", to_string(r.kind)}, {"value", print_term(r.term)}, {"steps", r.steps}}.dump() << "\n";
  } else if (!trace) {
    rep.out() << print_term(r.term) << "\n-- " << r.steps << " steps\n";
  }
  return kOk;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int cmd_repl(const Options& o, Reporter& rep, std::istream& in, bool prompt) {
  Loaded state;
  std::string origin = "<repl>";
  if (!o.files.empty()) {
    origin = o.files.front();
    if (int rc = load(o, origin, rep, state); rc != kOk) return rc;
  } else {
    try {
      state.spec = resolve_spec(o, nullptr, origin);
      state.sig = elaborate(state.module, state.spec);
    } catch (const Error& e) {
      rep.diag(e, origin);
      return kConfig;
    }
  }
  Evaluator ev(state.spec, &state.sig);
  auto term_of = [&](const std::string& src) {
    auto e = resolve_constructors(parse_term(src), state.sig);
    return synth_term({}, e, "", state.spec, state.sig);
  };
  std::string line;
  while (true) {
    if (prompt) rep.out() << "elevator> " << std::flush;
    if (!std::getline(in, line)) break;
    line = trim(line);
    if (line.empty()) continue;
    if (line == ":q" || line == ":quit") return kOk;
    try {
      if (line.rfind(":t ", 0) == 0) {
        rep.out() << print_type(term_of(line.substr(3)).type) << "\n";
      } else if (line.rfind(":step ", 0) == 0) {
        auto r = ev.step(term_of(line.substr(6)).term);
        if (r.stepped)
          rep.out() << r.rule << ": " << print_term(r.term) << "\n";
        else
          rep.out() << "no step\n";
      } else if (line.rfind("def ", 0) == 0 || line.rfind("data ", 0) == 0) {
        auto added = parse(line, origin);
        SurfaceModule next = state.module;
        next.datas.insert(next.datas.end(), added.datas.begin(), added.datas.end());
        next.defs.insert(next.defs.end(), added.defs.begin(), added.defs.end());
        state.sig = elaborate(next, state.spec);
        state.module = std::move(next);
        for (const auto& d : added.defs) rep.out() << "defined " << d.name << "\n";
        for (const auto& d : added.datas) rep.out() << "defined " << d.decl.name << "\n";
      } else if (line[0] == ':') {
        rep.diag(codes::kParse, "unknown command " + line.substr(0, line.find(' ')), {origin, 0, 0});
      } else {
        auto r = evaluate(ev, term_of(line).term, o.fuel);
        if (report_outcome(r, o.fuel, rep, origin) == kOk) rep.out() << print_term(r.term) << "\n";
      }
    } catch (const Error& e) {
      rep.diag(e, origin);
    }
  }
  return kOk;
}

int cmd_props(const Options& o, Reporter& rep) {
  NamedSpec ns{"code-program-linear", code_program_linear_spec()};
  try {
    std::optional<std::string> path = o.modes.empty() ? env_modes() : std::optional<std::string>(o.modes);
    if (path) ns = {fs::path(*path).stem().string(), load_mode_spec_file(*path)};
  } catch (const Error& e) {
    rep.diag(e, o.modes);
    return kConfig;
  }
  PropertyOptions po;
  po.seed = o.seed;
  po.terms = o.count;
  po.pairs = o.pairs.value_or(std::min<size_t>(o.count, 200));
  auto results = run_all_properties(ns, po);
  if (o.count > 0) results.push_back(hereditary_substitution_property(10));
  bool ok = std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.ok(); });
  if (rep.json_mode()) {
    json arr = json::array();
    for (const auto& r : results)
      arr.push_back({{"property", r.name},
                     {"spec", r.spec},
                     {"cases", r.cases},
                     {"failures", r.failures},
                     {"skipped", r.skipped},
                     {"note", r.note},
                     {"counterexample", r.counterexample}});
    rep.out() << arr.dump(2) << "\n";
  } else {
    rep.out() << "seed " << o.seed << "\n" << format_report(results);
  }
  if (!ok) rep.diag(codes::kProperty, "property failures; see report", {});
  return ok ? kOk : kProperty;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            bool prompt) {
  Options o;
  CLI::App app{"Adjoint-modal polymorphic calculus: checker, evaluator and property harness", "elevator"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sc) {
    sc->add_option("--modes", o.modes, "mode spec JSON file");
    sc->add_option("--format", o.format, "diagnostic format")->check(CLI::IsMember({"text", "json"}));
  };
  auto* check = app.add_subcommand("check", "parse, elaborate and type-check source files");
  common(check);
  check->add_option("files", o.files, "source files")->required();
  auto* run = app.add_subcommand("run", "evaluate an entry definition to a value");
  auto* trace = app.add_subcommand("trace", "evaluate printing every reduction step");
  for (auto* sc : {run, trace}) {
    common(sc);
    sc->add_option("--entry", o.entry, "entry definition");
    sc->add_option("--fuel", o.fuel, "maximum reduction steps")->check(CLI::PositiveNumber);
    sc->add_option("file", o.files, "source file")->required()->expected(1);
  }
  auto* repl = app.add_subcommand("repl", "interactive loop (:t e, :step e, :q)");
  common(repl);
  repl->add_option("--fuel", o.fuel, "maximum reduction steps")->check(CLI::PositiveNumber);
  repl->add_option("file", o.files, "source file to preload")->expected(0, 1);
  auto* props = app.add_subcommand("props", "run the metatheory property harness");
  common(props);
  props->add_option("--seed", o.seed, "random seed");
  props->add_option("--count", o.count, "generated terms per property");
  props->add_option("--pairs", o.pairs, "template and mode-safety pairs (default min(count, 200))");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error[" << codes::kConfig << "] " << e.what() << "\n";
    if (!app.get_subcommands().empty())
      err << app.get_subcommands().front()->help();
    return kConfig;
  }

  Reporter rep(o.format == "json", out, err);
  try {
    if (app.got_subcommand(check)) return cmd_check(o, rep);
    if (app.got_subcommand(run)) return cmd_run(o, rep, false);
    if (app.got_subcommand(trace)) return cmd_run(o, rep, true);
    if (app.got_subcommand(repl)) return cmd_repl(o, rep, in, prompt);
    if (app.got_subcommand(props)) return cmd_props(o, rep);
  } catch (const Error& e) {
    rep.diag(e, "");
    return exit_for(e.code());
  }
  return kConfig;
}

}  // namespace elevator::cli
