#include "elevator/properties.hpp"

#include <fmt/format.h>

#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "elevator/evaluator.hpp"
#include "elevator/frontend.hpp"
#include "elevator/generators.hpp"
#include "elevator/mode_equiv.hpp"
#include "elevator/printer.hpp"
#include "elevator/substitution.hpp"
#include "elevator/typing.hpp"

namespace elevator {

namespace {

// Keeps the smallest counterexample by printed length.
void record_failure(PropertyResult& r, const std::string& text) {
  ++r.failures;
  if (r.counterexample.empty() || text.size() < r.counterexample.size()) r.counterexample = text;
}

bool checks(const Context& ctx, const TermPtr& e, const TypePtr& t, const ModeSpec& spec, const Signature& sig,
            std::string* why = nullptr) {
  try {
    check_term(ctx, e, t, spec, sig);
    return true;
  } catch (const Error& err) {
    if (why) *why = err.code() + ": " + err.what();
    return false;
  }
}

std::string show(const TermPtr& e, const TypePtr& t) { return print_term(e) + " : " + print_type(t); }

PropertyResult make(const std::string& name, const NamedSpec& spec) {
  PropertyResult r;
  r.name = name;
  r.spec = spec.name;
  return r;
}

struct TermProps {
  PropertyResult preservation, template_preservation, progress, template_progress, substructural, merge, subst;
  std::map<std::string, size_t> rules;
};

void reduction_props(const Evaluator& ev, const GeneratedTerm& g, const NamedSpec& ns, const Signature& sig,
                     const PropertyOptions& opts, TermProps& p) {
  TermPtr e = g.term;
  bool pres_ok = true, tpres_ok = true, prog_ok = true, tprog_ok = true;
  bool saw_template = false;
  for (size_t i = 0; i < opts.steps_checked; ++i) {
    auto r = ev.step(e);
    const bool normal = ev.is_weak_normal(e);
    if (r.stepped == normal && prog_ok) {
      prog_ok = false;
      record_failure(p.progress, (r.stepped ? "steps although weak normal: " : "stuck: ") + show(e, g.type));
    }
    if (e->tag == Term::Tag::Susp) {
      saw_template = true;
      auto t = ev.template_step(e->body, e->hi);
      const bool nt = ev.is_normal_template(e->body, e->hi);
      if (t.stepped == nt && tprog_ok) {
        tprog_ok = false;
        record_failure(p.template_progress,
                       (t.stepped ? "template steps although normal: " : "template stuck: ") + show(e, g.type));
      }
      if (t.stepped && tpres_ok) {
        auto next = modify(e, [&](Term& s) { s.body = t.term; });
        std::string why;
        if (!checks({}, next, g.type, ns.spec, sig, &why)) {
          tpres_ok = false;
          record_failure(p.template_preservation,
                         show(e, g.type) + "  ==[" + t.rule + "]=>  " + print_term(next) + "  (" + why + ")");
        }
      }
    }
    if (!r.stepped) break;
    ++p.rules[r.rule];
    std::string why;
    if (pres_ok && !checks({}, r.term, g.type, ns.spec, sig, &why)) {
      pres_ok = false;
      record_failure(p.preservation,
                     show(e, g.type) + "  --[" + r.rule + "]-->  " + print_term(r.term) + "  (" + why + ")");
    }
    e = r.term;
  }
  ++p.preservation.cases;
  ++p.progress.cases;
  if (saw_template) {
    ++p.template_preservation.cases;
    ++p.template_progress.cases;
  }
}

void substructural_prop(const GeneratedTerm& g, const ModeSpec& spec, PropertyResult& r) {
  ++r.cases;
  for (const auto& d : g.ctx) {
    if (d.sort != Sort::TermVar) continue;
    size_t n = count_occurrences(g.term, d.name);
    bool bad = (n > 1 && !spec.allows(d.mode, StructRule::Contraction)) ||
               (n == 0 && !spec.allows(d.mode, StructRule::Weakening));
    if (bad) {
      record_failure(r, fmt::format("{} occurs {} times at mode {} in {}", d.name, n, d.mode, print_term(g.term)));
      return;
    }
  }
}

std::optional<UsageMask> try_merge(const Context& ctx, const ModeSpec& spec, const UsageMask& a, const UsageMask& b) {
  try {
    return merge_usage(ctx, spec, a, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void merge_prop(const Context& ctx, const ModeSpec& spec, std::mt19937_64& rng, PropertyResult& r) {
  if (ctx.empty()) return;
  ++r.cases;
  std::bernoulli_distribution flip(0.4);
  auto mask = [&] {
    UsageMask m(ctx.size());
    for (size_t i = 0; i < ctx.size(); ++i) m[i] = ctx[i].sort == Sort::TermVar && flip(rng);
    return m;
  };
  auto u1 = mask(), u2 = mask(), u3 = mask();
  // Independent reading of the law: a union, refused on shared non-contractible entries.
  auto oracle = [&](const UsageMask& a, const UsageMask& b) -> std::optional<UsageMask> {
    UsageMask out(ctx.size());
    for (size_t i = 0; i < ctx.size(); ++i) {
      if (a[i] && b[i] && !spec.allows(ctx[i].mode, StructRule::Contraction)) return std::nullopt;
      out[i] = a[i] || b[i];
    }
    return out;
  };
  auto m12 = try_merge(ctx, spec, u1, u2), m21 = try_merge(ctx, spec, u2, u1);
  if (m12 != m21 || m12 != oracle(u1, u2)) {
    record_failure(r, "commutativity/oracle disagreement over " + print_context(ctx));
    return;
  }
  auto left = m12 ? try_merge(ctx, spec, *m12, u3) : std::nullopt;
  auto m23 = try_merge(ctx, spec, u2, u3);
  auto right = m23 ? try_merge(ctx, spec, u1, *m23) : std::nullopt;
  if (left != right) record_failure(r, "associativity fails over " + print_context(ctx));
}

void subst_lemma_prop(Generator& gen, const GeneratedTerm& g, const NamedSpec& ns, const Signature& sig,
                      PropertyResult& r) {
  Subst sigma;
  for (const auto& d : g.ctx) {
    if (d.sort == Sort::TypeVar) {
      sigma.push_back(sub_type(d.name, gen.type_at(d.kind->hi, 1), erase_kind(d.kind)));
      continue;
    }
    auto v = gen.closed_term_of(d.type);
    if (!v) {
      ++r.skipped;
      return;
    }
    sigma.push_back(sub_term(d.name, v->term, d.mode));
  }
  ++r.cases;
  std::string why;
  try {
    auto checked = check_subst({}, sigma, g.ctx, ns.spec, sig);
    auto gamma = erase_context(g.ctx);
    auto e = subst_term(checked.subst, gamma, g.term);
    auto t = subst_type(checked.subst, gamma, g.type);
    if (!checks({}, e, t, ns.spec, sig, &why))
      record_failure(r, print_context(g.ctx) + " |- " + show(g.term, g.type) + "  under  " +
                            print_subst(checked.subst) + "  (" + why + ")");
  } catch (const Error& err) {
    record_failure(r, "substitution rejected: " + print_subst(sigma) + " for " + print_context(g.ctx) + " (" +
                          err.what() + ")");
  }
}

}  // namespace

std::vector<PropertyResult> term_properties(const NamedSpec& ns, const PropertyOptions& opts) {
  auto sig = prelude_signature(ns.spec);
  Evaluator ev(ns.spec, &sig);
  TermProps p{make("preservation", ns),        make("template-preservation", ns), make("progress", ns),
              make("template-progress", ns),   make("substructural-counts", ns),  make("usage-merge-laws", ns),
              make("substitution-lemma", ns), {}};
  Generator gen(ns.spec, sig, opts.seed);
  size_t produced = 0;
  for (size_t i = 0; i < opts.terms; ++i) {
    const Mode& k = gen.random_mode();
    auto g = gen.closed_term(k);
    if (!g) {
      ++p.preservation.skipped;
      continue;
    }
    ++produced;
    reduction_props(ev, *g, ns, sig, opts, p);

    Context ctx;
    std::optional<GeneratedTerm> open;
    for (int attempt = 0; attempt < 10 && !open; ++attempt) {
      ctx = gen.context(3);
      if (i % 3 == 0) ctx.insert(ctx.begin(), decl_type("tv" + std::to_string(i), kind_type(gen.random_mode())));
      open = gen.open_term(ctx, gen.type_at(gen.random_mode(), 2));
    }
    if (!open) {
      ++p.substructural.skipped;
      continue;
    }
    substructural_prop(*open, ns.spec, p.substructural);
    merge_prop(ctx, ns.spec, gen.rng(), p.merge);
    subst_lemma_prop(gen, *open, ns, sig, p.subst);
  }
  std::string hist;
  for (const auto& [rule, n] : p.rules) hist += fmt::format(" {}={}", rule, n);
  p.preservation.note = fmt::format("{} terms, {} checker rejections; steps:{}", produced, gen.rejected(), hist);
  return {p.preservation, p.template_preservation, p.progress, p.template_progress,
          p.substructural, p.merge,                p.subst};
}

PropertyResult construction_order_property(const NamedSpec& ns, const PropertyOptions& opts) {
  auto r = make("construction-order", ns);
  auto sig = prelude_signature(ns.spec);
  Evaluator ev(ns.spec, &sig);
  const auto& spec = ns.spec;
  struct Shape {
    Mode hi, lo;
    std::vector<Mode> holes;
  };
  std::vector<Shape> shapes;
  for (const auto& m : spec.modes())
    for (const auto& k : spec.modes()) {
      Shape s{m, k, {}};
      for (const auto& j : spec.modes())
        if (spec.gt(m, j) && spec.geq(j, k)) s.holes.push_back(j);
      if (!s.holes.empty()) shapes.push_back(s);
    }
  if (shapes.empty()) {
    r.note = "no strictly ordered modes; not applicable";
    r.applicable = false;
    return r;
  }
  Generator gen(spec, sig, opts.seed ^ 0xc0ffee);
  auto& rng = gen.rng();
  size_t attempts = 0;
  while (r.cases < opts.pairs && attempts < opts.pairs * 50) {
    ++attempts;
    const auto& s = shapes[std::uniform_int_distribution<size_t>(0, shapes.size() - 1)(rng)];
    auto pick_hole = [&] { return s.holes[std::uniform_int_distribution<size_t>(0, s.holes.size() - 1)(rng)]; };
    Mode jx = pick_hole(), jy = pick_hole();
    // Holes at modes without weakening get stored types, which the body can always consume by loading.
    auto hole_type = [&](const Mode& j) {
      if (spec.allows(j, StructRule::Weakening)) return gen.type_at(j, 1);
      std::vector<Mode> outs;
      for (const auto& m : spec.modes())
        if (spec.geq(m, j) && spec.allows(m, StructRule::Weakening)) outs.push_back(m);
      if (outs.empty()) return gen.type_at(j, 1);
      const Mode m = outs[std::uniform_int_distribution<size_t>(0, outs.size() - 1)(rng)];
      return ty_down(m, j, gen.type_at(m, 1));
    };
    auto ax = hole_type(jx), ay = hole_type(jy), c = gen.type_at(s.lo, 2);
    auto htype = ty_up(s.hi, s.lo, {decl_term("x", ax), decl_term("y", ay)}, c);
    auto h = gen.closed_term_of(htype);
    auto a1 = gen.closed_term_of(ax);
    auto a2 = gen.closed_term_of(ay);
    if (!h || !a1 || !a2) {
      ++r.skipped;
      continue;
    }
    auto hann = tm_annot(h->term, htype);
    // x filled first, then y
    auto fill_x = tm_annot(
        tm_susp("", "", {"y1"}, tm_force("", "", hann, {sub_term("x", a1->term, jx), sub_term("y", tm_var("y1"), jy)})),
        ty_up(s.hi, s.lo, {decl_term("y1", ay)}, c));
    auto left = tm_force("", "", fill_x, {sub_term("y1", a2->term, jy)});
    // y filled first, then x
    auto fill_y = tm_annot(
        tm_susp("", "", {"x1"}, tm_force("", "", hann, {sub_term("x", tm_var("x1"), jx), sub_term("y", a2->term, jy)})),
        ty_up(s.hi, s.lo, {decl_term("x1", ax)}, c));
    auto right = tm_force("", "", fill_y, {sub_term("x1", a1->term, jx)});
    auto outer = ty_up(s.hi, s.lo, {}, c);
    TermPtr lt, rt;
    try {
      lt = check_term({}, tm_susp("", "", {}, left), outer, spec, sig).term;
      rt = check_term({}, tm_susp("", "", {}, right), outer, spec, sig).term;
    } catch (const Error& err) {
      record_failure(r, std::string("composed template rejected: ") + err.what() + " for H = " + print_term(h->term));
      ++r.cases;
      continue;
    }
    ++r.cases;
    auto lv = evaluate(ev, lt, opts.fuel), rv = evaluate(ev, rt, opts.fuel);
    if (lv.kind != EvalOutcome::Kind::Value || rv.kind != EvalOutcome::Kind::Value) {
      record_failure(r, "did not reach a value: " + print_term(lt) + " / " + print_term(rt));
      continue;
    }
    if (!alpha_eq(lv.term, rv.term))
      record_failure(r, "H = " + print_term(h->term) + ", a1 = " + print_term(a1->term) + ", a2 = " +
                            print_term(a2->term) + ": " + print_term(lv.term) + " vs " + print_term(rv.term));
  }
  return r;
}

namespace {

// Same random decisions on both generators of a pair.
TypePtr pair_type(Generator& gen, const ModeSpec& spec, const Mode& observer) {
  std::vector<Mode> seen;
  for (const auto& m : spec.modes())
    if (spec.geq(m, observer)) seen.push_back(m);
  auto& rng = gen.rng();
  const Mode k = seen[std::uniform_int_distribution<size_t>(0, seen.size() - 1)(rng)];
  std::vector<Mode> hidden;
  for (const auto& l : spec.modes())
    if (spec.geq(k, l) && !spec.geq(l, observer)) hidden.push_back(l);
  if (!hidden.empty() && std::bernoulli_distribution(0.6)(rng)) {
    const Mode l = hidden[std::uniform_int_distribution<size_t>(0, hidden.size() - 1)(rng)];
    auto inner = ty_up(k, l, {}, gen.type_at(l, 2));
    if (std::bernoulli_distribution(0.5)(rng)) return ty_arrow(gen.type_at(k, 1), inner);
    return inner;
  }
  return gen.type_at(k, 2);
}

}  // namespace

PropertyResult mode_safety_property(const NamedSpec& ns, const Mode& observer, const PropertyOptions& opts) {
  auto r = make("mode-safety@" + observer, ns);
  const auto& spec = ns.spec;
  auto sig = prelude_signature(spec);
  Evaluator ev(spec, &sig);
  GenOptions g0, g1;
  g0.observer = g1.observer = observer;
  g1.variant = 1;
  Generator left(spec, sig, opts.seed ^ 0xab5, g0), right(spec, sig, opts.seed ^ 0xab5, g1);
  size_t differing = 0, attempts = 0;
  while (r.cases < opts.pairs && attempts < opts.pairs * 10) {
    ++attempts;
    auto t0 = pair_type(left, spec, observer);
    auto t1 = pair_type(right, spec, observer);
    auto e0 = left.closed_term_of(t0);
    auto e1 = right.closed_term_of(t1);
    if (!e0 || !e1 || !alpha_eq(t0, t1) || !equiv_term(e0->term, e1->term, t0->mode, observer, spec)) {
      ++r.skipped;
      continue;
    }
    ++r.cases;
    if (!alpha_eq(e0->term, e1->term)) ++differing;
    auto v0 = evaluate(ev, e0->term, opts.fuel), v1 = evaluate(ev, e1->term, opts.fuel);
    if (v0.kind != EvalOutcome::Kind::Value || v1.kind != EvalOutcome::Kind::Value) {
      record_failure(r, "no value: " + print_term(e0->term) + " / " + print_term(e1->term));
      continue;
    }
    if (!equiv_term(v0.term, v1.term, t0->mode, observer, spec))
      record_failure(r, show(e0->term, t0) + " and " + print_term(e1->term) + " evaluate to " +
                            print_term(v0.term) + " and " + print_term(v1.term));
  }
  r.note = fmt::format("{} of {} pairs differ at hidden modes", differing, r.cases);
  return r;
}

PropertyResult hereditary_substitution_property(int max_depth) {
  PropertyResult r;
  r.name = "hereditary-substitution";
  r.spec = "-";
  const Mode k = "U";
  size_t deepest = 0;
  for (int d = 1; d <= max_depth; ++d) {
    auto fam = nested_redex_family(d, k);
    size_t input = size(fam.type);
    for (const auto& s : fam.subst) input += size(s.type);
    SubstWatch watch;
    watch.limit = 10 * input;
    ++r.cases;
    try {
      auto out = subst_type(fam.subst, fam.gamma, fam.type, &watch);
      deepest = std::max(deepest, watch.max_depth);
      if (has_type_redex(out) || !alpha_eq(out, ty_unit(k)))
        record_failure(r, fmt::format("depth {}: {} became {}", d, print_type(fam.type), print_type(out)));
    } catch (const Error& err) {
      record_failure(r, fmt::format("depth {}: {} ({})", d, print_type(fam.type), err.what()));
    }
  }
  r.note = fmt::format("deepest recursion {}", deepest);
  return r;
}

std::vector<NamedSpec> default_property_specs() {
  return {{"single", single_mode_spec()},
          {"linear-intuitionistic", linear_intuitionistic_spec()},
          {"code-program-linear", code_program_linear_spec()}};
}

std::vector<PropertyResult> run_all_properties(const NamedSpec& ns, const PropertyOptions& opts) {
  auto out = term_properties(ns, opts);
  out.push_back(construction_order_property(ns, opts));
  const auto& spec = ns.spec;
  for (const auto& n : spec.modes()) {
    bool hides = false;
    for (const auto& m : spec.modes()) hides = hides || !spec.geq(m, n);
    if (hides) out.push_back(mode_safety_property(ns, n, opts));
  }
  return out;
}

std::string format_report(const std::vector<PropertyResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << fmt::format("{:<4} {:<26} {:<22} cases={} failures={} skipped={}", r.ok() ? "ok" : "FAIL", r.name, r.spec,
                      r.cases, r.failures, r.skipped);
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << "\n";
    if (!r.counterexample.empty()) os << "     counterexample: " << r.counterexample << "\n";
  }
  return os.str();
}

}  // namespace elevator
