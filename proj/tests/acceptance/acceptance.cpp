// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "elevator/evaluator.hpp"
#include "elevator/frontend.hpp"
#include "elevator/generators.hpp"
#include "elevator/mode_spec.hpp"
#include "elevator/printer.hpp"
#include "elevator/properties.hpp"
#include "elevator/syntax.hpp"
#include "elevator/typing.hpp"

using namespace elevator;

namespace {

const std::string kCorpus = ELEVATOR_CORPUS_DIR;
const std::string kSpecs = ELEVATOR_SPECS_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Loaded {
  ModeSpec spec;
  Signature sig;
};

Loaded load_corpus(const std::string& file, const std::string& spec_file, const std::string& text) {
  auto spec = load_mode_spec_file(kSpecs + "/" + spec_file);
  auto m = parse(text, file);
  return {spec, elaborate(m, spec)};
}

Outcome mode_spec_gate() {
  Outcome o;
  try {
    auto s = load_mode_spec_file(kSpecs + "/three_mode.json");
    if (!s.gt("C", "P") || !s.gt("P", "GF") || s.allows("GF", StructRule::Contraction) ||
        s.allows("GF", StructRule::Weakening)) {
      o = {false, "three-mode spec loaded with the wrong shape"};
      return o;
    }
  } catch (const Error& e) {
    return {false, std::string("three-mode spec rejected: ") + e.what()};
  }
  try {
    load_mode_spec_file(kSpecs + "/three_mode_bad.json");
    return {false, "bad spec accepted"};
  } catch (const SpecError& e) {
    if (e.kind() != SpecError::Kind::SignatureViolation) return {false, std::string("wrong rejection: ") + e.what()};
    o.detail = "bad spec rejected at (" + e.offending_pair.first + ", " + e.offending_pair.second + ")";
  }
  return o;
}

const std::vector<std::string> kFiles = {"nth_naive.elv",    "nth_opt.elv",          "nth_gen.elv",
                                         "convert_nat.elv",  "map_lin.elv",          "map_lin_meta.elv",
                                         "map_lin_meta_opt.elv", "map_lin_meta_gen.elv", "convert_list.elv"};

Outcome corpus_checks() {
  Outcome o;
  double worst = 0;
  for (const auto& f : kFiles) {
    std::istringstream in;
    std::ostringstream out, err;
    auto t0 = std::chrono::steady_clock::now();
    int code = cli::run_cli({"check", kCorpus + "/" + f}, in, out, err);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    if (code != 0) return {false, f + " exited " + std::to_string(code) + ": " + err.str()};
    if (secs >= 1.0) return {false, f + " took " + std::to_string(secs) + "s"};
  }
  o.detail = std::to_string(kFiles.size()) + " files, slowest " + std::to_string(int(worst * 1000)) + " ms";
  return o;
}

struct Mutation {
  std::string file, spec, from, to, code;
};

Outcome mutations() {
  const std::vector<Mutation> muts = {
      // a program-mode variable reached from inside a code-mode template
      {"nth_naive.elv", "two_mode.json", "store (susp (a, xs . force c @ (a, tail [a] xs)))",
       "store (susp (a, xs . match n' with | Zero => force c @ (a, xs) | Succ m => force c @ (a, xs)))",
       "MODE_ACCESS"},
      {"nth_gen.elv", "two_mode.json", "force (nthGen n') @", "force (nthGen xs) @", "MODE_ACCESS"},
      {"nth_opt.elv", "two_mode.json", "store (nthGen N)", "store (nthGen n)", "MODE_ACCESS"},
      {"convert_nat.elv", "two_mode.json", "store (Succ{C} N)", "store (Succ{C} n')", "MODE_ACCESS"},
      // garbage-free variables dropped or duplicated
      {"map_lin.elv", "three_mode.json", "| Nil => load F = f in Nil", "| Nil => Nil", "WEAKENING"},
      {"map_lin.elv", "three_mode.json", "load F = f in\n      Cons", "load F = f in load G = f in\n      Cons",
       "LINEARITY"},
      {"map_lin_meta.elv", "three_mode.json", "load X = force LIFT @ () x in",
       "load X = force LIFT @ () x in load X2 = force LIFT @ () x in", "LINEARITY"},
      {"map_lin_meta.elv", "three_mode.json", "| Nil => load LIFT = lift in store", "| Nil => store", "WEAKENING"},
      {"map_lin_meta_gen.elv", "three_mode.json", "| Nil => susp (b, f . load F = f in Nil)",
       "| Nil => susp (b, f . Nil)", "WEAKENING"},
      {"map_lin_meta_gen.elv", "three_mode.json", "force (mapLinMetaGen [a] rest) @ (b, store F)",
       "force (mapLinMetaGen [a] rest) @ (b, f)", "LINEARITY"},
      {"convert_list.elv", "three_mode.json", "| Nil => load LIFT = lift in store Nil", "| Nil => store Nil",
       "WEAKENING"},
      {"convert_list.elv", "three_mode.json", "load XS = convertList [a] (store LIFT) rest in",
       "load XS = convertList [a] (store LIFT) rest in load YS = convertList [a] (store LIFT) rest in", "LINEARITY"},
      {"map_lin_meta_opt.elv", "three_mode.json", "load XS = convertList [a] lift xs in",
       "load XS = convertList [a] lift xs in load YS = convertList [a] lift xs in", "LINEARITY"},
      {"map_lin_meta_opt.elv", "three_mode.json", "| Nil => susp (b, f . load F = f in Nil)",
       "| Nil => susp (b, f . Nil)", "WEAKENING"},
  };
  std::set<std::string> covered;
  for (const auto& m : muts) {
    auto text = slurp(kCorpus + "/" + m.file);
    auto pos = text.find(m.from);
    if (pos == std::string::npos) return {false, m.file + ": mutation site not found"};
    // the unmutated file must check
    try {
      load_corpus(m.file, m.spec, text);
    } catch (const Error& e) {
      return {false, m.file + " rejected before mutation: " + e.what()};
    }
    text.replace(pos, m.from.size(), m.to);
    std::string got = "accepted";
    try {
      load_corpus(m.file, m.spec, text);
    } catch (const Error& e) {
      got = e.code();
    }
    if (got != m.code) return {false, m.file + ": expected " + m.code + ", got " + got};
    covered.insert(m.file);
  }
  if (covered.size() != kFiles.size()) return {false, "not every corpus file has a mutation"};
  return {true, std::to_string(muts.size()) + " mutations over " + std::to_string(covered.size()) + " files"};
}

// store (susp (a, xs . head [a] (tail [a] ... xs)))
TermPtr expected_nth(int k) {
  TermPtr list = tm_var("xs");
  for (int i = 0; i < k; ++i) list = tm_app(tm_tapp(tm_def("tail"), ty_var("a", "P")), list);
  auto body = tm_app(tm_tapp(tm_def("head"), ty_var("a", "P")), list);
  return tm_store("C", "P", tm_susp("C", "P", {"a", "xs"}, body));
}

Outcome generated_code_shape() {
  std::string detail;
  for (const std::string file : {"nth_naive.elv", "nth_opt.elv"}) {
    Loaded l = load_corpus(file, "two_mode.json", slurp(kCorpus + "/" + file));
    Evaluator ev(l.spec, &l.sig);
    for (int k = 0; k <= 2; ++k) {
      auto src = "nth " + std::to_string(k) + "@P";
      auto e = synth_term({}, resolve_constructors(parse_term(src), l.sig), "", l.spec, l.sig).term;
      auto r = evaluate(ev, e, 10000);
      if (r.kind != EvalOutcome::Kind::Value) return {false, file + ": " + src + " did not reach a value"};
      if (!alpha_eq(r.term, expected_nth(k)))
        return {false, file + ": " + src + " gave " + print_term(r.term) + ", expected " + print_term(expected_nth(k))};
      if (k == 2) detail += file + " " + std::to_string(r.steps) + " steps; ";
    }
  }
  return {true, detail + "3 values alpha-equal per file"};
}

// Fills the holes x, y of `h : Up<hi,lo>[x : ax, y : ay |- c]` in both orders
// and evaluates each inside a closed suspension.
std::pair<TermPtr, TermPtr> fill_both_orders(const ModeSpec& spec, const Signature& sig, const TermPtr& h,
                                             const TypePtr& ax, const TypePtr& ay, const TypePtr& c,
                                             const TermPtr& a1, const TermPtr& a2, const Mode& hi, const Mode& lo) {
  auto htype = ty_up(hi, lo, {decl_term("x", ax), decl_term("y", ay)}, c);
  auto hann = tm_annot(h, htype);
  auto fill_x = tm_annot(
      tm_susp("", "", {"y1"}, tm_force("", "", hann, {sub_term("x", a1, ax->mode), sub_term("y", tm_var("y1"), ay->mode)})),
      ty_up(hi, lo, {decl_term("y1", ay)}, c));
  auto left = tm_force("", "", fill_x, {sub_term("y1", a2, ay->mode)});
  auto fill_y = tm_annot(
      tm_susp("", "", {"x1"}, tm_force("", "", hann, {sub_term("x", tm_var("x1"), ax->mode), sub_term("y", a2, ay->mode)})),
      ty_up(hi, lo, {decl_term("x1", ax)}, c));
  auto right = tm_force("", "", fill_y, {sub_term("x1", a1, ax->mode)});
  auto outer = ty_up(hi, lo, {}, c);
  Evaluator ev(spec, &sig);
  auto lt = check_term({}, tm_susp("", "", {}, left), outer, spec, sig).term;
  auto rt = check_term({}, tm_susp("", "", {}, right), outer, spec, sig).term;
  return {evaluate(ev, lt, 1000).term, evaluate(ev, rt, 1000).term};
}

Outcome construction_order() {
  auto spec = code_program_spec();
  auto sig = prelude_signature(spec);
  auto unit_p = ty_unit("P");
  auto fn_p = ty_arrow(unit_p, unit_p);
  // x y  with x := \z. z, y := ()
  {
    auto h = tm_susp("C", "P", {"x", "y"}, tm_app(tm_var("x"), tm_var("y")));
    auto [l, r] = fill_both_orders(spec, sig, h, fn_p, unit_p, unit_p, tm_lam("z", unit_p, tm_var("z")), tm_one("P"),
                                   "C", "P");
    auto want = tm_susp("C", "P", {}, tm_app(tm_lam("z", unit_p, tm_var("z")), tm_one("P")));
    if (!alpha_eq(l, r) || !alpha_eq(l, want))
      return {false, "application template: " + print_term(l) + " vs " + print_term(r)};
  }
  // load u = x in y  with x := store (), y := ()
  {
    auto stored = ty_down("C", "P", ty_unit("C"));
    auto h = tm_susp("C", "P", {"x", "y"}, tm_load("C", "P", "u", tm_var("x"), tm_var("y")));
    auto [l, r] = fill_both_orders(spec, sig, h, stored, unit_p, unit_p, tm_store("C", "P", tm_one("C")), tm_one("P"),
                                   "C", "P");
    auto want = tm_susp("C", "P", {}, tm_load("C", "P", "u", tm_store("C", "P", tm_one("C")), tm_one("P")));
    if (!alpha_eq(l, r) || !alpha_eq(l, want))
      return {false, "load template: " + print_term(l) + " vs " + print_term(r)};
  }
  PropertyOptions opts;
  opts.pairs = 200;
  auto res = construction_order_property({"three_mode", code_program_linear_spec()}, opts);
  if (!res.ok() || res.cases < 200)
    return {false, std::to_string(res.cases) + " generated pairs, " + std::to_string(res.failures) +
                       " failures: " + res.counterexample};
  return {true, "2 scripted pairs; " + std::to_string(res.cases) + " generated pairs, 0 failures"};
}

ModeSpec chain(const std::vector<std::pair<Mode, Mode>>& order) {
  RawModeSpec raw;
  raw.modes = {"M", "K", "L"};
  raw.order = order;
  for (const auto& m : raw.modes) {
    raw.signatures[m] = {StructRule::Contraction, StructRule::Weakening};
    raw.recursion[m] = RecursionPolicy::General;
  }
  return ModeSpec::validate(raw);
}

Outcome normal_template() {
  // load x = (\x. store (\y. y)) () in store (x ())   at mode L
  auto fn_m = ty_arrow(ty_unit("M"), ty_unit("M"));
  auto head = tm_annot(tm_lam("x", ty_unit("L"), tm_store("M", "L", tm_lam("y", ty_unit("M"), tm_var("y")))),
                       ty_arrow(ty_unit("L"), ty_down("M", "L", fn_m)));
  auto surface = tm_load("M", "L", "x", tm_app(head, tm_one("L")), tm_store("M", "L", tm_app(tm_var("x"), tm_one("M"))));
  auto want_type = ty_down("M", "L", ty_unit("M"));
  auto below = chain({{"M", "K"}, {"K", "L"}});
  auto sig_b = prelude_signature(below);
  TermPtr term;
  try {
    term = check_term({}, surface, want_type, below, sig_b).term;
  } catch (const Error& e) {
    return {false, std::string("example rejected: ") + e.what()};
  }
  Evaluator ev(below, &sig_b);
  if (!ev.is_normal_template(term, "K")) return {false, "not a normal template at K"};
  if (ev.template_step(term, "K").stepped) return {false, "template step fired at K"};
  auto at_l = ev.template_step(term, "L");
  if (!at_l.stepped || at_l.rule != "beta") return {false, "no beta at ambient L"};
  auto above = chain({{"M", "L"}, {"L", "K"}});
  auto sig_a = prelude_signature(above);
  Evaluator ev2(above, &sig_a);
  auto r = ev2.template_step(term, "K");
  if (ev2.is_normal_template(term, "K") || !r.stepped || r.rule != "beta")
    return {false, "with L >= K the inner redex was not reduced"};
  return {true, "normal at K under M>K>L; beta fires once L>=K"};
}

Outcome metatheory() {
  PropertyOptions opts;
  opts.terms = 500;
  std::string detail;
  for (const auto& ns : default_property_specs()) {
    for (const auto& r : term_properties(ns, opts)) {
      if (!r.ok()) return {false, r.name + " on " + ns.name + ": " + r.counterexample};
      if (r.name == "preservation" && r.cases < 500)
        return {false, ns.name + ": only " + std::to_string(r.cases) + " terms"};
    }
    detail += ns.name + " ";
  }
  return {true, "500 terms each: " + detail};
}

Outcome mode_safety() {
  PropertyOptions opts;
  opts.pairs = 200;
  auto three = code_program_linear_spec();
  size_t total = 0;
  for (const Mode n : {"P", "C"}) {
    auto r = mode_safety_property({"three_mode", three}, n, opts);
    if (!r.ok()) return {false, "observer " + n + ": " + r.counterexample};
    if (r.cases < 200) return {false, "observer " + n + ": only " + std::to_string(r.cases) + " pairs"};
    total += r.cases;
  }
  return {true, std::to_string(total) + " pairs over observers P and C, 0 failures"};
}

Outcome hereditary() {
  auto r = hereditary_substitution_property(10);
  if (!r.ok()) return {false, r.counterexample};
  return {true, r.note};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mode-spec gate", mode_spec_gate},
      {"corpus type-checks", corpus_checks},
      {"mutation rejection", mutations},
      {"generated-code shape", generated_code_shape},
      {"construction-order invariance", construction_order},
      {"normal-template classification", normal_template},
      {"metatheory properties", metatheory},
      {"mode safety", mode_safety},
      {"hereditary substitution", hereditary},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << " " << criteria[i].first << " ("
              << std::fixed << std::setprecision(2) << secs << "s)";
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    std::cout << std::endl;
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
